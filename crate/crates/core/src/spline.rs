//! Natural cubic spline on a uniform grid, zero outside its support.

#[derive(Debug, Clone)]
pub(crate) struct CubicSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub(crate) fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives (Thomas)
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
                if i == 0 {
                    c[i] = 1.0 / 4.0;
                    d[i] = rhs / 4.0;
                } else {
                    let denom = 4.0 - c[i - 1];
                    c[i] = 1.0 / denom;
                    d[i] = (rhs - d[i - 1]) / denom;
                }
            }
            for i in (0..k).rev() {
                let next = if i + 1 < k { m[i + 2] } else { 0.0 };
                m[i + 1] = d[i] - c[i] * next;
            }
        }
        Self { x0, h, y, m }
    }

    pub(crate) fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        if x < self.x0 || x > self.x_max() {
            return 0.0;
        }
        let k = (((x - self.x0) / self.h).floor() as usize).min(n - 2);
        let xa = self.x0 + k as f64 * self.h;
        let t = (x - xa) / self.h;
        let s = 1.0 - t;
        let h2 = self.h * self.h;
        s * self.y[k]
            + t * self.y[k + 1]
            + ((s * s * s - s) * self.m[k] + (t * t * t - t) * self.m[k + 1]) * h2 / 6.0
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.y
    }
}
