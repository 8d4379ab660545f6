//! Fixed-step classical Runge-Kutta integration on flat state slices.

use crate::error::Result;

pub(crate) struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(len: usize) -> Self {
        Rk4 { k1: vec![0.0; len], k2: vec![0.0; len], k3: vec![0.0; len], k4: vec![0.0; len], tmp: vec![0.0; len] }
    }

    /// Advances `y` by one step of size `h` (which may be negative).
    #[allow(clippy::needless_range_loop)]
    pub fn step<F>(&mut self, y: &mut [f64], h: f64, rhs: &mut F) -> Result<()>
    where
        F: FnMut(&[f64], &mut [f64]) -> Result<()>,
    {
        let n = y.len();
        rhs(y, &mut self.k1)?;
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * self.k1[i];
        }
        rhs(&self.tmp, &mut self.k2)?;
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * self.k2[i];
        }
        rhs(&self.tmp, &mut self.k3)?;
        for i in 0..n {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        rhs(&self.tmp, &mut self.k4)?;
        for i in 0..n {
            y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        Ok(())
    }
}

/// Number of equal steps covering `span` with steps no longer than `max_step`.
pub(crate) fn step_count(span: f64, max_step: f64) -> usize {
    ((span.abs() / max_step).ceil() as usize).max(1)
}

/// Root of the cubic Hermite interpolant through (t0, y0, d0), (t1, y1, d1),
/// assuming y0 and y1 have opposite signs (or one of them is zero).
pub(crate) fn hermite_root(t0: f64, y0: f64, d0: f64, t1: f64, y1: f64, d1: f64) -> f64 {
    if y0 == 0.0 {
        return t0;
    }
    if y1 == 0.0 {
        return t1;
    }
    let h = t1 - t0;
    let eval = |s: f64| {
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * d1
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let lo_sign = y0.signum();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if eval(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    t0 + 0.5 * (lo + hi) * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_integrates_harmonic_oscillator() {
        let mut y = vec![0.0, 1.0];
        let mut rk = Rk4::new(2);
        let n = 1000;
        let h = std::f64::consts::PI / n as f64;
        let mut rhs = |s: &[f64], d: &mut [f64]| {
            d[0] = s[1];
            d[1] = -s[0];
            Ok(())
        };
        for _ in 0..n {
            rk.step(&mut y, h, &mut rhs).unwrap();
        }
        assert!(y[0].abs() < 1e-11);
        assert!((y[1] + 1.0).abs() < 1e-11);
    }

    #[test]
    fn hermite_root_of_sine() {
        let (t0, t1) = (3.1, 3.2);
        let r = hermite_root(t0, t0.sin(), t0.cos(), t1, t1.sin(), t1.cos());
        assert!((r - std::f64::consts::PI).abs() < 1e-6);
    }
}
