use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural cubic spline through tabulated `(phi, u)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableData", into = "TableData")]
pub struct Tabulated {
    phi: Vec<f64>,
    u: Vec<f64>,
    /// Second derivatives at the knots; zero at both ends.
    m: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableData {
    phi: Vec<f64>,
    u: Vec<f64>,
}

impl TryFrom<TableData> for Tabulated {
    type Error = Error;

    fn try_from(d: TableData) -> Result<Self> {
        Tabulated::new(d.phi, d.u)
    }
}

impl From<Tabulated> for TableData {
    fn from(t: Tabulated) -> Self {
        TableData { phi: t.phi, u: t.u }
    }
}

impl Tabulated {
    pub fn new(phi: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if phi.len() != u.len() {
            return Err(Error::invalid(
                "potential table",
                format!("{} phi values but {} u values", phi.len(), u.len()),
            ));
        }
        if phi.len() < 4 {
            return Err(Error::invalid("potential table", "need at least 4 samples"));
        }
        if phi.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential table", "non-finite entry"));
        }
        if let Some(w) = phi.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "potential table",
                format!("phi must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        let m = natural_second_derivatives(&phi, &u);
        Ok(Self { phi, u, m })
    }

    /// Reads a two-column `phi,u` CSV. A non-numeric first row is taken as a
    /// header; lines starting with `#` are skipped.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut phi = Vec::new();
        let mut u = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::invalid("potential table", format!("row {i} has < 2 columns")));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    phi.push(a);
                    u.push(b);
                }
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::invalid(
                        "potential table",
                        format!("row {i} is not numeric"),
                    ))
                }
            }
        }
        Self::new(phi, u)
    }

    pub fn from_csv_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.phi[0], self.phi[self.phi.len() - 1])
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.phi, &self.u)
    }

    /// Value (order 0), slope (1) or curvature (2) at `x`.
    pub fn eval(&self, x: f64, order: u8) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return Err(Error::Extrapolation { phi: x, lo, hi });
        }
        let i = match self.phi.partition_point(|&p| p <= x) {
            0 => 0,
            k => (k - 1).min(self.phi.len() - 2),
        };
        let h = self.phi[i + 1] - self.phi[i];
        let a = (self.phi[i + 1] - x) / h;
        let b = (x - self.phi[i]) / h;
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        Ok(match order {
            0 => {
                a * self.u[i]
                    + b * self.u[i + 1]
                    + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0
            }
            1 => {
                (self.u[i + 1] - self.u[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * mi
                    + (3.0 * b * b - 1.0) / 6.0 * h * mj
            }
            _ => a * mi + b * mj,
        })
    }
}

fn natural_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    // Thomas algorithm on the interior rows.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let a = h0;
        let b = 2.0 * (h0 + h1);
        let c = h1;
        let d = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_in_the_interior() {
        // A natural spline reproduces any function with zero end curvature
        // exactly only if it is linear; check linear data exactly.
        let phi: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let u: Vec<f64> = phi.iter().map(|p| 2.0 * p - 1.0).collect();
        let t = Tabulated::new(phi, u).unwrap();
        for x in [0.0, 0.45, 1.7, 5.7] {
            assert!((t.eval(x, 0).unwrap() - (2.0 * x - 1.0)).abs() < 1e-13);
            assert!((t.eval(x, 1).unwrap() - 2.0).abs() < 1e-12);
            assert!(t.eval(x, 2).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unsorted_and_extrapolation() {
        assert!(Tabulated::new(vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4]).is_err());
        let t = Tabulated::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(t.eval(3.5, 0), Err(Error::Extrapolation { .. })));
        assert!(t.eval(3.0, 0).is_ok());
    }

    #[test]
    fn csv_with_header_and_comments() {
        let text = "# a comment\nphi,u\n0,0\n1,1\n2,4\n3,9\n";
        let t = Tabulated::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(t.range(), (0.0, 3.0));
        assert!((t.eval(2.0, 0).unwrap() - 4.0).abs() < 1e-14);
    }
}
