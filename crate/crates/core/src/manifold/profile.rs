use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Value of the profile function and its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// One tabulated row `(u, f, f', f'')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub u: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `f(u) = offset + amplitude * cos(frequency * u + phase)`.
    Harmonic { offset: f64, amplitude: f64, frequency: f64, phase: f64 },
    /// Quintic Hermite interpolation through `(f, f', f'')` samples, so the
    /// interpolant reproduces all three columns at the nodes.
    Table(Vec<ProfileSample>),
}

/// Positive profile `f` on a closed interval, inducing `du^2 + f(u)^2 dv^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    kind: ProfileKind,
    u_min: f64,
    u_max: f64,
}

impl Profile {
    pub fn harmonic(offset: f64, amplitude: f64, frequency: f64, phase: f64) -> Result<Self> {
        Self::harmonic_on(offset, amplitude, frequency, phase, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn harmonic_on(
        offset: f64,
        amplitude: f64,
        frequency: f64,
        phase: f64,
        u_min: f64,
        u_max: f64,
    ) -> Result<Self> {
        if !(u_min < u_max) {
            return Err(GeoError::InvalidModel(format!("empty profile interval [{u_min}, {u_max}]")));
        }
        let p = Profile { kind: ProfileKind::Harmonic { offset, amplitude, frequency, phase }, u_min, u_max };
        if u_min.is_infinite() || u_max.is_infinite() {
            if !(offset - amplitude.abs() > 0.0) {
                return Err(GeoError::InvalidModel(
                    "unbounded harmonic profile must satisfy offset > |amplitude|".into(),
                ));
            }
        } else {
            p.check_positive()?;
        }
        Ok(p)
    }

    pub fn table(mut rows: Vec<ProfileSample>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(GeoError::InvalidModel("profile table needs at least two rows".into()));
        }
        rows.sort_by(|a, b| a.u.total_cmp(&b.u));
        if rows.windows(2).any(|w| !(w[1].u > w[0].u)) {
            return Err(GeoError::InvalidModel("profile table has repeated u values".into()));
        }
        let p = Profile { u_min: rows[0].u, u_max: rows[rows.len() - 1].u, kind: ProfileKind::Table(rows) };
        p.check_positive()?;
        Ok(p)
    }

    fn check_positive(&self) -> Result<()> {
        let n = 4096;
        for i in 0..=n {
            let u = self.u_min + (self.u_max - self.u_min) * i as f64 / n as f64;
            let v = self.eval(u)?;
            if !(v.f > 0.0) {
                return Err(GeoError::InvalidModel(format!("profile is not positive at u = {u}")));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.u_min, self.u_max)
    }

    /// Period in `u` for harmonic profiles.
    pub fn period(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Harmonic { frequency, .. } if frequency != 0.0 => {
                Some(2.0 * std::f64::consts::PI / frequency.abs())
            }
            _ => None,
        }
    }

    pub fn eval(&self, u: f64) -> Result<ProfileValue> {
        if !(u >= self.u_min && u <= self.u_max) {
            return Err(GeoError::ProfileDomain { u, min: self.u_min, max: self.u_max });
        }
        Ok(match &self.kind {
            ProfileKind::Harmonic { offset, amplitude, frequency, phase } => {
                let arg = frequency * u + phase;
                let (s, c) = arg.sin_cos();
                ProfileValue {
                    f: offset + amplitude * c,
                    df: -amplitude * frequency * s,
                    d2f: -amplitude * frequency * frequency * c,
                }
            }
            ProfileKind::Table(rows) => quintic_hermite(rows, u),
        })
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ProfileKind::Harmonic { offset, amplitude, frequency, phase } => {
                format!("f(u)={offset}+{amplitude}*cos({frequency}*u+{phase}) on [{}, {}]", self.u_min, self.u_max)
            }
            ProfileKind::Table(rows) => {
                format!("tabulated f with {} rows on [{}, {}]", rows.len(), self.u_min, self.u_max)
            }
        }
    }
}

fn quintic_hermite(rows: &[ProfileSample], u: f64) -> ProfileValue {
    let idx = match rows.binary_search_by(|r| r.u.total_cmp(&u)) {
        Ok(i) => return ProfileValue { f: rows[i].f, df: rows[i].df, d2f: rows[i].d2f },
        Err(i) => i.clamp(1, rows.len() - 1) - 1,
    };
    let (a, b) = (&rows[idx], &rows[idx + 1]);
    let h = b.u - a.u;
    let s = (u - a.u) / h;
    let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));

    // basis functions and their s-derivatives
    let h0 = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
    ];
    let h1 = [
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
    ];
    let h2 = [
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
    ];
    let h3 = [10.0 * s3 - 15.0 * s4 + 6.0 * s5, 30.0 * s2 - 60.0 * s3 + 30.0 * s4, 60.0 * s - 180.0 * s2 + 120.0 * s3];
    let h4 = [-4.0 * s3 + 7.0 * s4 - 3.0 * s5, -12.0 * s2 + 28.0 * s3 - 15.0 * s4, -24.0 * s + 84.0 * s2 - 60.0 * s3];
    let h5 =
        [0.5 * (s3 - 2.0 * s4 + s5), 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4), 0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3)];
    let combo = |k: usize| {
        a.f * h0[k] + h * a.df * h1[k] + h * h * a.d2f * h2[k] + b.f * h3[k] + h * b.df * h4[k] + h * h * b.d2f * h5[k]
    };
    ProfileValue { f: combo(0), df: combo(1) / h, d2f: combo(2) / (h * h) }
}
