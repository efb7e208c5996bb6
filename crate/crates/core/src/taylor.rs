//! Second-order Taylor remainders of `|x|^p` and the comparable gauge `K`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `F` (when `eps = 0`) or its regularization `F_eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorRemainder {
    p: f64,
    eps: f64,
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::param("p", format!("{p} must be > 1")))
    }
}

fn check_args(a: f64, b: f64) -> Result<()> {
    if a.is_nan() || b.is_nan() {
        Err(Error::param("a/b", "NaN argument"))
    } else {
        Ok(())
    }
}

impl TaylorRemainder {
    pub fn new(p: f64, eps: f64) -> Result<Self> {
        check_p(p)?;
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::param("eps", format!("{eps} must be >= 0")));
        }
        Ok(TaylorRemainder { p, eps })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `Phi(x) = |x|^p` or `(x^2 + eps^2)^{p/2}`.
    pub fn phi(&self, x: f64) -> f64 {
        if self.eps == 0.0 {
            x.abs().powf(self.p)
        } else {
            (x * x + self.eps * self.eps).powf(0.5 * self.p)
        }
    }

    /// `Phi'(x)`.
    pub fn phi_prime(&self, x: f64) -> f64 {
        if self.eps == 0.0 {
            if x == 0.0 {
                0.0
            } else {
                self.p * x * x.abs().powf(self.p - 2.0)
            }
        } else {
            self.p * x * (x * x + self.eps * self.eps).powf(0.5 * self.p - 1.0)
        }
    }

    /// `Phi''(x)`, with `|x|` clamped at `1e-14` when it is singular.
    pub fn phi_second(&self, x: f64) -> f64 {
        let p = self.p;
        if self.eps == 0.0 {
            p * (p - 1.0) * x.abs().max(1e-14).powf(p - 2.0)
        } else {
            let e2 = self.eps * self.eps;
            p * (x * x + e2).powf(0.5 * p - 2.0) * ((p - 1.0) * x * x + e2)
        }
    }

    /// `Phi(b) - Phi(a) - Phi'(a) (b - a)` evaluated without cancellation
    /// when `b` is close to `a`.
    pub fn value(&self, a: f64, b: f64) -> f64 {
        self.value_from(a, self.phi(a), self.phi_prime(a), b)
    }

    /// As `value`, with `Phi(a)` and `Phi'(a)` supplied.
    #[inline]
    pub fn value_from(&self, a: f64, phi_a: f64, dphi_a: f64, b: f64) -> f64 {
        let d = b - a;
        if d == 0.0 {
            return 0.0;
        }
        if self.eps == 0.0 {
            if self.p == 2.0 {
                return d * d;
            }
            if a != 0.0 && d.abs() < SERIES_BAND * a.abs() {
                return phi_a * bracket_series(self.p, d / a);
            }
        } else {
            let big_a = a * a + self.eps * self.eps;
            let eta = d * (b + a) / big_a;
            if eta.abs() < SERIES_BAND {
                let q = 0.5 * self.p;
                return (phi_a * bracket_series(q, eta) + q * phi_a / big_a * d * d).max(0.0);
            }
        }
        (self.phi(b) - phi_a - dphi_a * d).max(0.0)
    }
}

const SERIES_BAND: f64 = 1e-2;

/// `(1 + d)^q - 1 - q d` for `|d| < 1e-2` by its binomial series.
fn bracket_series(q: f64, d: f64) -> f64 {
    let mut coef = q * (q - 1.0) / 2.0;
    let mut term = d * d;
    let mut acc = coef * term;
    for n in 3..16 {
        coef *= (q - (n as f64 - 1.0)) / n as f64;
        term *= d;
        let add = coef * term;
        acc += add;
        if add.abs() <= 1e-18 * acc.abs() {
            break;
        }
    }
    acc
}

pub fn f_value(a: f64, b: f64, p: f64) -> Result<f64> {
    check_args(a, b)?;
    Ok(TaylorRemainder::new(p, 0.0)?.value(a, b))
}

pub fn f_eps_value(a: f64, b: f64, p: f64, eps: f64) -> Result<f64> {
    check_args(a, b)?;
    if !(eps > 0.0) {
        return Err(Error::param("eps", "must be > 0"));
    }
    Ok(TaylorRemainder::new(p, eps)?.value(a, b))
}

/// `K(a, b; p) = (b - a)^2 (|a| v |b|)^{p-2}`.
pub fn k_value(a: f64, b: f64, p: f64) -> Result<f64> {
    check_args(a, b)?;
    check_p(p)?;
    if a == b {
        return Ok(0.0);
    }
    Ok((b - a) * (b - a) * a.abs().max(b.abs()).powf(p - 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityScan {
    pub p: f64,
    pub samples: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

/// Min and max of `F/K` over heavy-tailed random pairs plus corner cases.
pub fn comparability_scan(p: f64, n_samples: usize, seed: u64) -> Result<ComparabilityScan> {
    check_p(p)?;
    if n_samples < 1000 {
        return Err(Error::param("n_samples", "need at least 1000 samples"));
    }
    let rem = TaylorRemainder::new(p, 0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut record = |a: f64, b: f64| {
        if a == b {
            return;
        }
        let k = (b - a) * (b - a) * a.abs().max(b.abs()).powf(p - 2.0);
        if k > 0.0 && k.is_finite() {
            let r = rem.value(a, b) / k;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    };
    let heavy = |rng: &mut ChaCha8Rng| -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        sign * (2.0 * z).exp()
    };
    for i in 0..n_samples {
        let a = heavy(&mut rng);
        match i % 6 {
            0 | 1 => {
                let b = heavy(&mut rng);
                record(a, b);
            }
            2 => {
                let h = 10f64.powf(-rng.random_range(1.0..8.0));
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                record(a, a * (1.0 + s * h));
            }
            3 => record(0.0, a),
            4 => record(a, 0.0),
            _ => {
                let u: f64 = rng.random_range(0.0..2.0);
                record(a, -a * u);
            }
        }
    }
    Ok(ComparabilityScan {
        p,
        samples: n_samples,
        ratio_min: lo,
        ratio_max: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(f_value(1.0, 2.0, 3.0).unwrap(), 4.0);
        assert!((f_value(0.0, -1.7, 1.5).unwrap() - 1.7f64.powf(1.5)).abs() < 1e-15);
        for &(a, b) in &[(0.3, -2.0), (1.5, 1.5001), (-4.0, 3.0)] {
            let v = f_value(a, b, 2.0).unwrap();
            assert!((v - (b - a) * (b - a)).abs() < 1e-12 * (b - a) * (b - a));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(f_value(1.0, 2.0, 1.0).is_err());
        assert!(f_value(f64::NAN, 2.0, 2.0).is_err());
        assert!(k_value(1.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn eps_limit() {
        let f = f_value(1.3, -0.7, 1.5).unwrap();
        let fe = f_eps_value(1.3, -0.7, 1.5, 1e-6).unwrap();
        assert!((f - fe).abs() <= 1e-6);
    }

    #[test]
    fn stable_close_arguments() {
        let r = TaylorRemainder::new(1.5, 0.0).unwrap();
        let a: f64 = 0.8;
        let h = 1e-7;
        let expect = 0.5 * 1.5 * 0.5 * a.powf(-0.5) * h * h;
        assert!((r.value(a, a + h) / expect - 1.0).abs() < 1e-6);
        let re = TaylorRemainder::new(1.5, 0.1).unwrap();
        let e2 = re.phi_second(a);
        assert!((re.value(a, a + h) / (0.5 * e2 * h * h) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn p_two_scan_is_degenerate() {
        let s = comparability_scan(2.0, 10_000, 1).unwrap();
        assert!((s.ratio_min - 1.0).abs() < 1e-9 && (s.ratio_max - 1.0).abs() < 1e-9);
    }
}
