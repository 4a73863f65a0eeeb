//! Dense complex LU for the small systems of the reflectionless solve.

use num_complex::Complex64;

pub(crate) struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    /// smallest |pivot| relative to the largest input entry
    pub(crate) pivot_ratio: f64,
}

impl ComplexLu {
    /// Factorizes the row-major `n x n` matrix `a`.
    pub(crate) fn new(n: usize, mut a: Vec<Complex64>) -> Self {
        let scale = a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let (p, _) = (k..n)
                .map(|r| (r, a[r * n + k].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if p != k {
                for col in 0..n {
                    a.swap(k * n + col, p * n + col);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            min_pivot = min_pivot.min(pivot.norm());
            if pivot.norm() == 0.0 {
                continue;
            }
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                for col in k + 1..n {
                    let v = a[k * n + col];
                    a[r * n + col] -= f * v;
                }
            }
        }
        let pivot_ratio = if scale > 0.0 { min_pivot / scale } else { 0.0 };
        Self {
            n,
            lu: a,
            perm,
            sign,
            pivot_ratio,
        }
    }

    pub(crate) fn determinant(&self) -> Complex64 {
        let mut d = Complex64::new(self.sign, 0.0);
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    /// Solves `A X = B` for row-major `n x m` `b`, in place.
    pub(crate) fn solve_into(&self, b: &mut [Complex64], m: usize) {
        let n = self.n;
        let src = b.to_vec();
        for (r, &p) in self.perm.iter().enumerate() {
            b[r * m..(r + 1) * m].copy_from_slice(&src[p * m..(p + 1) * m]);
        }
        for r in 0..n {
            for k in 0..r {
                let f = self.lu[r * n + k];
                for col in 0..m {
                    let v = b[k * m + col];
                    b[r * m + col] -= f * v;
                }
            }
        }
        for r in (0..n).rev() {
            for k in r + 1..n {
                let f = self.lu[r * n + k];
                for col in 0..m {
                    let v = b[k * m + col];
                    b[r * m + col] -= f * v;
                }
            }
            let d = self.lu[r * n + r];
            for col in 0..m {
                b[r * m + col] /= d;
            }
        }
    }
}
