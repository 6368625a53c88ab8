//! Knot vectors, span lookup and Cox-de Boor basis evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when deciding whether a parameter sits on the domain boundary.
const DOMAIN_SLACK: f64 = 1e-12;

/// Open (clamped) knot vector of a B-spline basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KnotVectorDoc", into = "KnotVectorDoc")]
pub struct KnotVector {
    values: Vec<f64>,
    degree: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnotVectorDoc {
    degree: usize,
    values: Vec<f64>,
}

impl TryFrom<KnotVectorDoc> for KnotVector {
    type Error = Error;
    fn try_from(doc: KnotVectorDoc) -> Result<Self> {
        KnotVector::new(doc.values, doc.degree)
    }
}

impl From<KnotVector> for KnotVectorDoc {
    fn from(k: KnotVector) -> Self {
        KnotVectorDoc {
            degree: k.degree,
            values: k.values,
        }
    }
}

impl KnotVector {
    pub fn new(values: Vec<f64>, degree: usize) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::KnotVector("non-finite knot value".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::KnotVector("knots must be nondecreasing".into()));
        }
        if values.len() < 2 * (degree + 1) {
            return Err(Error::KnotVector(format!(
                "{} knots cannot support degree {degree}",
                values.len()
            )));
        }
        let m = values.len();
        let (lo, hi) = (values[0], values[m - 1]);
        if hi <= lo {
            return Err(Error::KnotVector("empty parameter domain".into()));
        }
        if values[..=degree].iter().any(|&v| v != lo)
            || values[m - degree - 1..].iter().any(|&v| v != hi)
        {
            return Err(Error::KnotVector(format!(
                "end knots must be repeated {} times",
                degree + 1
            )));
        }
        let kv = KnotVector { values, degree };
        for (value, mult) in kv.interior_breaks() {
            if mult > degree {
                return Err(Error::KnotVector(format!(
                    "interior knot {value} has multiplicity {mult} > degree {degree}"
                )));
            }
        }
        Ok(kv)
    }

    /// Open uniform knot vector on [0, 1] with `n_spans` equal spans.
    pub fn open_uniform(degree: usize, n_spans: usize) -> Self {
        let mut values = vec![0.0; degree + 1];
        for i in 1..n_spans {
            values.push(i as f64 / n_spans as f64);
        }
        values.extend(std::iter::repeat_n(1.0, degree + 1));
        KnotVector { values, degree }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_basis(&self) -> usize {
        self.values.len() - self.degree - 1
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Distinct interior knot values with their multiplicities.
    pub fn interior_breaks(&self) -> Vec<(f64, usize)> {
        let (lo, hi) = (self.first(), self.last());
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            if v == lo || v == hi {
                continue;
            }
            match out.last_mut() {
                Some((last, m)) if *last == v => *m += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// Multiplicity of an exact knot value (0 when absent).
    pub fn multiplicity(&self, u: f64) -> usize {
        self.values.iter().filter(|&&v| v == u).count()
    }

    /// Indices `i` of the nonempty spans `[values[i], values[i+1])`, in increasing order.
    pub fn nonempty_spans(&self) -> Vec<usize> {
        (self.degree..self.num_basis())
            .filter(|&i| self.values[i + 1] > self.values[i])
            .collect()
    }

    /// Clamps parameters that miss the domain by rounding only.
    fn check_domain(&self, u: f64) -> Result<f64> {
        let (lo, hi) = (self.first(), self.last());
        let slack = DOMAIN_SLACK * (hi - lo);
        if !(u >= lo - slack && u <= hi + slack) {
            return Err(Error::Domain { value: u, lo, hi });
        }
        Ok(u.clamp(lo, hi))
    }

    /// Span index `i` with `values[i] <= u < values[i+1]`; the right end of the
    /// domain belongs to the last nonempty span.
    pub fn find_span(&self, u: f64) -> Result<usize> {
        let u = self.check_domain(u)?;
        let n = self.num_basis();
        if u >= self.values[n] {
            return Ok(n - 1);
        }
        // binary search over [degree, n)
        let (mut low, mut high) = (self.degree, n);
        let mut mid = (low + high) / 2;
        while u < self.values[mid] || u >= self.values[mid + 1] {
            if u < self.values[mid] {
                high = mid;
            } else {
                low = mid;
            }
            mid = (low + high) / 2;
        }
        Ok(mid)
    }

    /// Nonzero basis functions and their derivatives at `u`.
    ///
    /// Returns the span index and `ders[k][j]`, the k-th derivative of basis
    /// function `span - degree + j`. Orders above the degree are identically zero.
    pub fn basis_and_derivatives(&self, u: f64, n_derivs: usize) -> Result<(usize, Vec<Vec<f64>>)> {
        let span = self.find_span(u)?;
        let u = self.check_domain(u)?;
        Ok((span, self.ders_at_span(span, u, n_derivs)))
    }

    /// Basis values only.
    pub fn basis(&self, u: f64) -> Result<(usize, Vec<f64>)> {
        let (span, mut d) = self.basis_and_derivatives(u, 0)?;
        Ok((span, d.swap_remove(0)))
    }

    pub(crate) fn ders_at_span(&self, span: usize, u: f64, n_derivs: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let knots = &self.values;
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = u - knots[span + 1 - j];
            right[j] = knots[span + j] - u;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; n_derivs + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let top = n_derivs.min(p);
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=top {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize - 1) <= pk as isize {
                    k - 1
                } else {
                    p - r
                };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for k in 1..=top {
            for v in ders[k].iter_mut() {
                *v *= factor;
            }
            factor *= (p - k) as f64;
        }
        ders
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.num_basis())
            .map(|i| {
                if p == 0 {
                    0.5 * (self.values[i] + self.values[i + 1])
                } else {
                    self.values[i + 1..=i + p].iter().sum::<f64>() / p as f64
                }
            })
            .collect()
    }

    /// Affine map of the parameter domain onto `[lo, hi]`.
    pub fn remapped(&self, lo: f64, hi: f64) -> Self {
        let (a, b) = (self.first(), self.last());
        let values = self
            .values
            .iter()
            .map(|&v| {
                if v == a {
                    lo
                } else if v == b {
                    hi
                } else {
                    lo + (v - a) / (b - a) * (hi - lo)
                }
            })
            .collect();
        KnotVector {
            values,
            degree: self.degree,
        }
    }

    /// Knot vector of the same continuity raised by one degree.
    pub fn elevated(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len() + self.values.len() / 2);
        let mut i = 0;
        while i < self.values.len() {
            let v = self.values[i];
            while i < self.values.len() && self.values[i] == v {
                values.push(v);
                i += 1;
            }
            values.push(v);
        }
        KnotVector {
            values,
            degree: self.degree + 1,
        }
    }

    pub(crate) fn with_inserted(&self, u: f64) -> Self {
        let mut values = self.values.clone();
        let pos = values.partition_point(|&v| v <= u);
        values.insert(pos, u);
        KnotVector {
            values,
            degree: self.degree,
        }
    }
}
