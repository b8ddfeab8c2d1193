//! Dense linear algebra over a [`FieldSpec`] for the tiny matrices used in
//! classification: ranks, kernels, determinants and characteristic
//! polynomials, all division-free where it matters for characteristic 2.

use crate::ffield::{FieldElem, FieldSpec};

/// Row-major square matrix of side `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Mat {
    pub n: usize,
    pub a: Vec<FieldElem>,
}

impl Mat {
    pub fn new(n: usize, a: Vec<FieldElem>) -> Self {
        debug_assert_eq!(a.len(), n * n);
        Mat { n, a }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> FieldElem {
        self.a[i * self.n + j]
    }

    pub fn mul(&self, f: &FieldSpec, o: &Mat) -> Mat {
        let n = self.n;
        let mut a = vec![f.zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = f.zero();
                for k in 0..n {
                    s = f.add(s, f.mul(self.at(i, k), o.at(k, j)));
                }
                a[i * n + j] = s;
            }
        }
        Mat { n, a }
    }

    /// `self - x I`.
    pub fn minus_scalar(&self, f: &FieldSpec, x: FieldElem) -> Mat {
        let mut m = self.clone();
        for i in 0..self.n {
            m.a[i * self.n + i] = f.sub(m.a[i * self.n + i], x);
        }
        m
    }

    pub fn apply(&self, f: &FieldSpec, v: &[FieldElem]) -> Vec<FieldElem> {
        (0..self.n)
            .map(|i| (0..self.n).fold(f.zero(), |s, k| f.add(s, f.mul(self.at(i, k), v[k]))))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form and pivot columns.
    fn rref(&self, f: &FieldSpec) -> (Vec<FieldElem>, Vec<usize>) {
        let n = self.n;
        let mut a = self.a.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..n).find(|&i| !a[i * n + c].is_zero()) else {
                continue;
            };
            for j in 0..n {
                a.swap(r * n + j, p * n + j);
            }
            let inv = f.inv(a[r * n + c]).expect("pivot is nonzero");
            for j in 0..n {
                a[r * n + j] = f.mul(a[r * n + j], inv);
            }
            for i in 0..n {
                if i != r && !a[i * n + c].is_zero() {
                    let t = a[i * n + c];
                    for j in 0..n {
                        a[i * n + j] = f.sub(a[i * n + j], f.mul(t, a[r * n + j]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self, f: &FieldSpec) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self, f: &FieldSpec) -> Vec<Vec<FieldElem>> {
        let n = self.n;
        let (a, piv) = self.rref(f);
        let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); n];
                v[fc] = f.one();
                for (row, &pc) in piv.iter().enumerate() {
                    v[pc] = f.neg(a[row * n + fc]);
                }
                v
            })
            .collect()
    }

    pub fn det(&self, f: &FieldSpec) -> FieldElem {
        let n = self.n;
        let mut a = self.a.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i * n + c].is_zero()) else {
                return f.zero();
            };
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                }
                det = f.neg(det);
            }
            let piv = a[c * n + c];
            det = f.mul(det, piv);
            let inv = f.inv(piv).expect("pivot is nonzero");
            for i in c + 1..n {
                if !a[i * n + c].is_zero() {
                    let t = f.mul(a[i * n + c], inv);
                    for j in c..n {
                        a[i * n + j] = f.sub(a[i * n + j], f.mul(t, a[c * n + j]));
                    }
                }
            }
        }
        det
    }

    fn principal_minor(&self, f: &FieldSpec, idx: &[usize]) -> FieldElem {
        let k = idx.len();
        let mut a = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                a.push(self.at(i, j));
            }
        }
        Mat::new(k, a).det(f)
    }

    /// Characteristic polynomial `det(tI - A)`, constant term first, monic.
    ///
    /// The coefficient of `t^{n-k}` is `(-1)^k` times the sum of the `k x k`
    /// principal minors, which holds in every characteristic.
    pub fn char_poly(&self, f: &FieldSpec) -> Vec<FieldElem> {
        let n = self.n;
        let mut c = vec![f.zero(); n + 1];
        c[n] = f.one();
        for k in 1..=n {
            let mut s = f.zero();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize == k {
                    let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                    s = f.add(s, self.principal_minor(f, &idx));
                }
            }
            c[n - k] = if k % 2 == 1 { f.neg(s) } else { s };
        }
        c
    }

    pub fn embed(&self, from: &FieldSpec, to: &FieldSpec) -> Mat {
        Mat {
            n: self.n,
            a: self
                .a
                .iter()
                .map(|&x| from.embed(x, to).expect("compatible tower"))
                .collect(),
        }
    }
}

/// Roots of `poly` among `candidates`, with multiplicities, by repeated
/// synthetic division. Returns the roots found and the degree left over.
pub(crate) fn roots_with_multiplicity(
    f: &FieldSpec,
    poly: &[FieldElem],
    candidates: impl Iterator<Item = FieldElem>,
) -> (Vec<(FieldElem, usize)>, usize) {
    let mut p = poly.to_vec();
    let mut out = Vec::new();
    for x in candidates {
        if p.len() <= 1 {
            break;
        }
        let mut m = 0;
        loop {
            if p.len() <= 1 {
                break;
            }
            let (q, r) = synthetic_div(f, &p, x);
            if !r.is_zero() {
                break;
            }
            p = q;
            m += 1;
        }
        if m > 0 {
            out.push((x, m));
        }
    }
    (out, p.len() - 1)
}

fn synthetic_div(f: &FieldSpec, p: &[FieldElem], x: FieldElem) -> (Vec<FieldElem>, FieldElem) {
    let d = p.len() - 1;
    let mut q = vec![f.zero(); d];
    let mut acc = f.zero();
    for i in (0..=d).rev() {
        acc = f.add(f.mul(acc, x), p[i]);
        if i > 0 {
            q[i - 1] = acc;
        }
    }
    (q, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: &FieldSpec, rows: [[i64; 4]; 4]) -> Mat {
        Mat::new(4, rows.iter().flatten().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn rank_det_kernel() {
        let f = FieldSpec::new(3, 1).unwrap();
        let a = m(&f, [[1, 2, 0, 0], [2, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]);
        // first block has det 1 - 4 = -3 = 0 mod 3
        assert_eq!(a.rank(&f), 2);
        assert!(a.det(&f).is_zero());
        for v in a.kernel(&f) {
            assert!(a.apply(&f, &v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(a.kernel(&f).len(), 2);
        let i = m(&f, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(i.det(&f), f.one());
        assert_eq!(i.rank(&f), 4);
    }

    #[test]
    fn char_poly_of_companion() {
        // companion matrix of t^4 + t + 1 over F_2
        let f = FieldSpec::new(2, 1).unwrap();
        let a = m(&f, [[0, 0, 0, 1], [1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let cp = a.char_poly(&f);
        let want: Vec<FieldElem> = [1, 1, 0, 0, 1].iter().map(|&x| f.from_int(x)).collect();
        assert_eq!(cp, want);
        // its roots live in F_16 and form one Frobenius orbit
        let f16 = FieldSpec::new(2, 4).unwrap();
        let cp16: Vec<FieldElem> = cp.iter().map(|&c| f.embed(c, &f16).unwrap()).collect();
        let (roots, left) = roots_with_multiplicity(&f16, &cp16, f16.nonzero_elements());
        assert_eq!(left, 0);
        assert_eq!(roots.len(), 4);
    }

    #[test]
    fn multiplicities() {
        let f = FieldSpec::new(5, 1).unwrap();
        // (t-2)^3 (t-1) expanded
        let a = m(&f, [[2, 1, 0, 0], [0, 2, 1, 0], [0, 0, 2, 0], [0, 0, 0, 1]]);
        let (roots, left) = roots_with_multiplicity(&f, &a.char_poly(&f), f.nonzero_elements());
        assert_eq!(left, 0);
        assert_eq!(roots, vec![(f.from_int(1), 1), (f.from_int(2), 3)]);
    }
}
