//! Polynomial endomorphisms of affine n-space.
//!
//! An [`Endo`] is an n-tuple `(f1, ..., fn)` of t-free polynomials in
//! `x1, ..., xn`. The product `σ.compose(τ)` is `(f1(g), ..., fn(g))` where
//! `τ = (g1, ..., gn)`; as a map on points it is "σ after τ".

use std::collections::HashMap;
use std::fmt;

use num_integer::binomial;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::{Degree, Monomial, Poly};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Endo {
    n: usize,
    components: Vec<Poly>,
}

/// A point of affine n-space with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn coords(&self) -> &[Rational] {
        &self.0
    }
}

impl Endo {
    /// Requires exactly `n` components, each in `n` variables and free of `t`.
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        for (i, f) in components.iter().enumerate() {
            if f.nvars() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: f.nvars(),
                });
            }
            if f.has_param() {
                return Err(Error::UnexpectedParameter { component: i + 1 });
            }
        }
        Ok(Endo { n, components })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity needs n >= 1");
        Endo {
            n,
            components: (1..=n).map(|i| Poly::var(n, i)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    /// Component `f_i`, 1-based.
    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i - 1]
    }

    pub fn into_components(self) -> Vec<Poly> {
        self.components
    }

    pub fn compose(&self, other: &Endo) -> Result<Endo> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        let components = self
            .components
            .iter()
            .map(|f| f.substitute(&other.components))
            .collect::<Result<Vec<_>>>()?;
        Ok(Endo {
            n: self.n,
            components,
        })
    }

    /// `max_i deg(f_i)`.
    pub fn degree(&self) -> Result<u32> {
        self.components
            .iter()
            .map(Poly::total_degree)
            .max()
            .and_then(Degree::finite)
            .ok_or(Error::DegenerateInput)
    }

    /// Truncation of every component modulo `(x1, ..., xn)^2`.
    pub fn affine_part(&self) -> Endo {
        Endo {
            n: self.n,
            components: self.components.iter().map(|f| f.truncate(1)).collect(),
        }
    }

    pub fn has_identity_affine_part(&self) -> bool {
        self.affine_part() == Endo::identity(self.n)
    }

    /// Row `i` holds the coefficients of `x1, ..., xn` in `f_{i+1}`.
    pub fn linear_matrix(&self) -> Matrix {
        let n = self.n;
        self.components
            .iter()
            .map(|f| {
                (0..n)
                    .map(|j| {
                        let mut exps = vec![0; n];
                        exps[j] = 1;
                        f.coeff(&Monomial::new(&exps, 0))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn translation(&self) -> Vec<Rational> {
        self.components.iter().map(Poly::constant_term).collect()
    }

    /// Degree one with an invertible linear part.
    pub fn is_affine(&self) -> bool {
        matches!(self.degree(), Ok(1)) && !linalg::determinant(&self.linear_matrix()).is_zero()
    }

    /// `f_i = a_i x_i + p_i(x_{i+1}, ..., x_n)` with `a_i != 0` for every `i`.
    pub fn is_triangular(&self) -> bool {
        let n = self.n;
        self.components.iter().enumerate().all(|(k, f)| {
            let i = k + 1;
            let xi = Poly::var(n, i);
            let mut exps = vec![0; n];
            exps[k] = 1;
            let a = f.coeff(&Monomial::new(&exps, 0));
            if a.is_zero() {
                return false;
            }
            let rest = f - &xi.scale(&a);
            let later: Vec<usize> = (i + 1..=n).collect();
            rest.supported_on(&later)
        })
    }

    /// Entry `(i, j)` is `∂f_{i+1}/∂x_{j+1}`.
    pub fn jacobian_matrix(&self) -> Vec<Vec<Poly>> {
        self.components
            .iter()
            .map(|f| {
                (1..=self.n)
                    .map(|j| f.partial_derivative(j).expect("index in range"))
                    .collect()
            })
            .collect()
    }

    pub fn jacobian_det(&self) -> Poly {
        poly_determinant(&self.jacobian_matrix(), self.n)
    }

    /// Value of the Jacobian determinant at `a`, computed from the evaluated
    /// Jacobian matrix without expanding the symbolic determinant.
    pub fn jacobian_det_at(&self, a: &Point) -> Result<Rational> {
        let m = self
            .jacobian_matrix()
            .iter()
            .map(|row| row.iter().map(|p| p.evaluate(&a.0, None)).collect())
            .collect::<Result<Matrix>>()?;
        Ok(linalg::determinant(&m))
    }

    pub fn eval(&self, a: &Point) -> Result<Point> {
        self.components
            .iter()
            .map(|f| f.evaluate(&a.0, None))
            .collect::<Result<Vec<_>>>()
            .map(Point)
    }

    pub fn coeff_vector(&self, d: u32) -> Result<CoeffVector> {
        let deg = self.degree().unwrap_or(0);
        if deg > d {
            return Err(Error::Filtration {
                degree: deg,
                bound: d,
            });
        }
        let basis = monomial_basis(self.n, d);
        let entries = self
            .components
            .iter()
            .flat_map(|f| {
                basis
                    .iter()
                    .map(move |e| f.coeff(&Monomial::new(e, 0)))
            })
            .collect();
        Ok(CoeffVector {
            n: self.n,
            d,
            entries,
        })
    }

    pub fn from_coeff_vector(v: &CoeffVector) -> Result<Endo> {
        let basis = monomial_basis(v.n, v.d);
        let expected = v.n * basis.len();
        if v.entries.len() != expected {
            return Err(Error::CoeffLength {
                expected,
                found: v.entries.len(),
            });
        }
        let components = v
            .entries
            .chunks(basis.len())
            .map(|chunk| {
                Poly::from_terms(
                    v.n,
                    basis
                        .iter()
                        .zip(chunk)
                        .map(|(e, c)| (Monomial::new(e, 0), c.clone())),
                )
            })
            .collect();
        Endo::new(components)
    }
}

/// Coordinates of an element of `E_{<=d}` in the monomial basis of
/// [`monomial_basis`], components concatenated in order `1..=n`.
///
/// The length is `n * C(n+d, d)`: each of the `n` components carries
/// `C(n+d, d)` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffVector {
    pub n: usize,
    pub d: u32,
    pub entries: Vec<Rational>,
}

impl CoeffVector {
    pub fn expected_len(n: usize, d: u32) -> usize {
        n * binomial(n + d as usize, d as usize)
    }
}

/// Exponent vectors of total degree `<= d` in `n` variables: ascending degree,
/// and within one degree lexicographically descending (`x1^k` first).
pub fn monomial_basis(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn fill(slot: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[slot] = e;
            fill(slot + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    for k in 0..=d {
        fill(0, k, &mut cur, &mut out);
    }
    out
}

/// Cofactor expansion along rows, memoised on the set of remaining columns.
pub fn poly_determinant(m: &[Vec<Poly>], nvars: usize) -> Poly {
    fn minor(
        m: &[Vec<Poly>],
        row: usize,
        cols: u64,
        nvars: usize,
        memo: &mut HashMap<u64, Poly>,
    ) -> Poly {
        if row == m.len() {
            return Poly::one(nvars);
        }
        if let Some(p) = memo.get(&cols) {
            return p.clone();
        }
        let mut acc = Poly::zero(nvars);
        let mut sign_negative = false;
        for j in 0..m.len() {
            if cols & (1 << j) == 0 {
                continue;
            }
            let entry = &m[row][j];
            if !entry.is_zero() {
                let sub = minor(m, row + 1, cols & !(1 << j), nvars, memo);
                if !sub.is_zero() {
                    let prod = entry * &sub;
                    acc = if sign_negative { acc - prod } else { acc + prod };
                }
            }
            sign_negative = !sign_negative;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    assert!(m.len() < 64, "matrix too large");
    let all = if m.is_empty() { 0 } else { (1u64 << m.len()) - 1 };
    minor(m, 0, all, nvars, &mut HashMap::new())
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Whether the polynomial is a nonzero constant.
pub fn is_unit_constant(p: &Poly) -> bool {
    p.as_constant().is_some_and(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_endo;
    use crate::rational::int;

    fn e(s: &str) -> Endo {
        parse_endo(s).unwrap()
    }

    fn nagata() -> Endo {
        e("[x - 2*y*(y^2+x*z) - z*(y^2+x*z)^2, y + z*(y^2+x*z), z]")
    }

    #[test]
    fn identity_and_composition() {
        assert_eq!(Endo::identity(2), e("[x1, x2]"));
        let s = e("[x1 + x2^2, x2]");
        assert_eq!(Endo::identity(2).compose(&s).unwrap(), s);
        assert_eq!(s.compose(&Endo::identity(2)).unwrap(), s);
        assert_eq!(
            s.compose(&e("[x1, x1 + x2]")).unwrap(),
            e("[x1 + (x1 + x2)^2, x1 + x2]")
        );
        assert_eq!(s.compose(&e("[x1 - x2^2, x2]")).unwrap(), Endo::identity(2));
        assert!(s.compose(&Endo::identity(3)).is_err());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(e("[x1 + x2^3, x2]").degree().unwrap(), 3);
        assert_eq!(nagata().degree().unwrap(), 5);
        assert_eq!(e("[x1 + x2 + 7, 2*x2]").degree().unwrap(), 1);
        assert_eq!(e("[0, 0]").degree(), Err(Error::DegenerateInput));
        // constant maps have degree 0
        assert_eq!(e("[1, 0]").degree().unwrap(), 0);
    }

    #[test]
    fn affine_part_examples() {
        assert_eq!(
            e("[x1 + 3 + 2*x2 + x2^2, x2]").affine_part(),
            e("[x1 + 2*x2 + 3, x2]")
        );
        assert_eq!(nagata().affine_part(), Endo::identity(3));
        let a = e("[2*x1 - x2 + 1, x1]");
        assert_eq!(a.affine_part(), a);
        assert!(e("[x1 + x2^2, x2]").has_identity_affine_part());
        assert!(!e("[2*x1, x2]").has_identity_affine_part());
        assert!(nagata().has_identity_affine_part());
    }

    #[test]
    fn subgroup_predicates() {
        assert!(e("[x1 + x2^3, 2*x2 + 5, x3]").is_triangular());
        assert!(!e("[x1, x2 + x1^2]").is_triangular());
        assert!(e("[x1 + x2, x2 + 1]").is_affine());
        assert!(!e("[x1 + x2, 2*x1 + 2*x2]").is_affine());
        assert!(!e("[x1 + x2^2, x2]").is_affine());
        assert!(!e("[0, 0]").is_affine());
        assert!(!e("[x1 + x1*x2, x2]").is_triangular());
    }

    #[test]
    fn jacobians() {
        assert_eq!(Endo::identity(4).jacobian_det(), Poly::one(4));
        assert_eq!(nagata().jacobian_det(), Poly::one(3));
        assert_eq!(e("[x1*x2, x2]").jacobian_det(), Poly::var(2, 2));
        let phi = e("[x1 + x2^2*x1, x2 - x1^3]");
        let a = Point(vec![crate::rational::ratio(2, 3), int(-5)]);
        assert_eq!(
            phi.jacobian_det_at(&a).unwrap(),
            phi.jacobian_det().evaluate(a.coords(), None).unwrap()
        );
        assert_eq!(
            e("[x1^2]").jacobian_det(),
            Poly::constant(1, int(2)) * Poly::var(1, 1)
        );
    }

    #[test]
    fn evaluation() {
        let a = Point(vec![int(1), int(2)]);
        assert_eq!(Endo::identity(2).eval(&a).unwrap(), a);
        assert_eq!(
            e("[x1 + x2^2, x2]").eval(&a).unwrap(),
            Point(vec![int(5), int(2)])
        );
        assert!(e("[x1, x2]").eval(&Point(vec![int(1)])).is_err());
    }

    #[test]
    fn coefficient_embedding() {
        let v = e("[3*x1 + 2]").coeff_vector(1).unwrap();
        assert_eq!(v.entries, vec![int(2), int(3)]);

        let s = e("[x1 + x2^2, x1*x2 - 1]");
        let v = s.coeff_vector(2).unwrap();
        assert_eq!(v.entries.len(), 12);
        assert_eq!(CoeffVector::expected_len(2, 2), 12);
        assert_eq!(Endo::from_coeff_vector(&v).unwrap(), s);
        // basis order: 1, x1, x2, x1^2, x1*x2, x2^2
        assert_eq!(
            v.entries,
            [0, 1, 0, 0, 0, 1, -1, 0, 0, 0, 1, 0].map(int).to_vec()
        );

        assert_eq!(
            s.coeff_vector(1),
            Err(Error::Filtration {
                degree: 2,
                bound: 1
            })
        );
        let short = CoeffVector {
            n: 2,
            d: 2,
            entries: vec![int(1)],
        };
        assert!(matches!(
            Endo::from_coeff_vector(&short),
            Err(Error::CoeffLength { .. })
        ));
    }

    #[test]
    fn basis_sizes_match_binomials() {
        for n in 1..=4 {
            for d in 0..=5u32 {
                assert_eq!(
                    n * monomial_basis(n, d).len(),
                    CoeffVector::expected_len(n, d)
                );
            }
        }
    }
}
