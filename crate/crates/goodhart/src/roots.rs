//! Real-root extraction for the cubics that drive the solvers.
//!
//! Every cubic here has a nonzero leading coefficient, so its derivative is a
//! quadratic with closed-form roots. That splits the line into monotone
//! intervals, each holding at most one root, which a safeguarded
//! Newton/bisection refinement then pins down. This avoids both Cardano branch
//! selection near multiple roots and the risk of a blind scan stepping over a
//! close root pair.

/// Refinement stops when the bracket or step falls below this width.
const REFINE_TOL: f64 = 1e-12;

/// Roots closer than this are reported once.
const DEDUP_TOL: f64 = 1e-8;

/// `c3 x^3 + c2 x^2 + c1 x + c0` with `c3 != 0`.
#[derive(Debug, Clone, Copy)]
pub struct Cubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Cubic {
    pub fn eval(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }

    /// Critical points in ascending order (empty when the cubic is monotone).
    fn critical_points(&self) -> Vec<f64> {
        let a = 3.0 * self.c3;
        let b = 2.0 * self.c2;
        let c = self.c1;
        let disc = b * b - 4.0 * a * c;
        if disc <= 0.0 {
            return Vec::new();
        }
        // Numerically stable quadratic roots.
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let q = if q == 0.0 { -0.5 * disc.sqrt() } else { q };
        let mut r = [q / a, c / q];
        if r[0] > r[1] {
            r.swap(0, 1);
        }
        r.to_vec()
    }

    /// A magnitude beyond which the cubic has no real roots (Cauchy bound).
    fn outer_bound(&self) -> f64 {
        1.0 + (self.c2.abs().max(self.c1.abs()).max(self.c0.abs())) / self.c3.abs()
    }

    /// All real roots, ascending, deduplicated within `1e-8`.
    pub fn real_roots(&self) -> Vec<f64> {
        assert!(self.c3 != 0.0, "leading coefficient must be nonzero");
        let bound = self.outer_bound();
        let crits = self.critical_points();

        let mut roots = Vec::with_capacity(3);
        let mut brackets = Vec::with_capacity(3);

        if crits.is_empty() {
            // Monotone: exactly one real root, somewhere inside the Cauchy bound.
            brackets.push((-bound, bound));
        } else {
            let (x1, x2) = (crits[0], crits[1]);
            let (f1, f2) = (self.eval(x1), self.eval(x2));
            // Tangency at a critical point is itself a (double) root.
            if f1 == 0.0 {
                roots.push(x1);
            }
            if f2 == 0.0 {
                roots.push(x2);
            }
            let lo = (-bound).min(x1 - 1.0);
            let hi = bound.max(x2 + 1.0);
            if self.eval(lo) * f1 < 0.0 {
                brackets.push((lo, x1));
            }
            if f1 * f2 < 0.0 {
                brackets.push((x1, x2));
            }
            if f2 * self.eval(hi) < 0.0 {
                brackets.push((x2, hi));
            }
        }
        for (lo, hi) in brackets {
            if let Some(r) = self.refine(lo, hi) {
                roots.push(r);
            }
        }

        roots.sort_by(|a, b| a.total_cmp(b));
        roots.dedup_by(|a, b| (*a - *b).abs() < DEDUP_TOL);
        roots
    }

    /// Safeguarded Newton/bisection on a sign-change bracket, then a couple of
    /// plain Newton polish steps to push the residual to machine level.
    fn refine(&self, mut lo: f64, mut hi: f64) -> Option<f64> {
        let (flo, fhi) = (self.eval(lo), self.eval(hi));
        if flo == 0.0 {
            return Some(lo);
        }
        if fhi == 0.0 {
            return Some(hi);
        }
        if flo * fhi > 0.0 {
            return None;
        }
        // Orient so that f(lo) < 0 < f(hi).
        if flo > 0.0 {
            std::mem::swap(&mut lo, &mut hi);
        }
        let mut x = 0.5 * (lo + hi);
        let mut step = (hi - lo).abs();
        let mut prev_step = step;
        for _ in 0..200 {
            let f = self.eval(x);
            let df = self.eval_derivative(x);
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton_ok = df != 0.0 && {
                let candidate = x - f / df;
                let inside = (candidate - lo) * (candidate - hi) < 0.0;
                inside && (f / df).abs() < 0.5 * prev_step
            };
            prev_step = step;
            let next = if newton_ok {
                x - f / df
            } else {
                0.5 * (lo + hi)
            };
            step = (next - x).abs();
            x = next;
            if step < REFINE_TOL || lo == hi {
                break;
            }
        }
        for _ in 0..3 {
            let df = self.eval_derivative(x);
            if df == 0.0 {
                break;
            }
            let next = x - self.eval(x) / df;
            if !next.is_finite() || next == x {
                break;
            }
            x = next;
        }
        Some(x)
    }
}
