//! Sylvester elimination over Q(i)[z].

use std::sync::Arc;

use num_traits::{One, Zero};

use super::{BiPoly, DefiningPolynomial};
use crate::error::{Error, Result};
use crate::field::{AnalyticExpr, Coefficient, GaussianRational, Poly, RationalFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgOp {
    Sum,
    Product,
}

/// Sylvester matrix of `p` (formal degree `p.len()-1`) and `q`.
pub(crate) fn sylvester<T: Clone>(p: &[T], q: &[T], zero: T) -> Vec<Vec<T>> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (j, c) in p.iter().enumerate() {
            row[i + m - j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (j, c) in q.iter().enumerate() {
            row[i + n - j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free Gaussian elimination; every division is exact.
pub fn bareiss_det(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

pub(crate) fn resultant_poly(p: &[Poly], q: &[Poly]) -> Poly {
    bareiss_det(sylvester(p, q, Poly::zero()))
}

/// `Res_W(P, Q)` as an element of Q(i)(z).
pub fn resultant(p: &DefiningPolynomial, q: &DefiningPolynomial) -> Result<Coefficient> {
    let (bp, mp) = p.primitive_with_factor()?;
    let (bq, mq) = q.primitive_with_factor()?;
    let det = RationalFunction::from_poly(resultant_poly(bp.coeffs(), bq.coeffs()));
    let scale = mp.pow(q.degree() as i32)?.mul(&mq.pow(p.degree() as i32)?);
    Ok(Coefficient::Exact(det.div(&scale)?))
}

/// `J = (-1)^{ν(ν-1)/2} Res_W(P, ∂P/∂W) / A_ν`.
pub fn discriminant(p: &DefiningPolynomial) -> Result<Coefficient> {
    let coeffs = p.exact_coeffs()?;
    let nu = p.degree();
    if nu < 2 {
        return Err(Error::DegreeTooLow(nu));
    }
    let dp = DefiningPolynomial::from_rational(
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&GaussianRational::from_integer(j as i64)))
            .collect(),
    )?;
    let Coefficient::Exact(res) = resultant(p, &dp)? else { unreachable!() };
    let mut j = res.div(coeffs.last().expect("nonempty"))?;
    if (nu * (nu - 1) / 2) % 2 == 1 {
        j = j.neg();
    }
    Ok(Coefficient::Exact(j))
}

/// True when `b(z0, W)` is square-free for a small integer `z0` where the
/// leading coefficient survives. A factor shared by `b` and `∂b/∂W` would
/// survive that specialization, so this proves `b` square-free.
fn square_free_by_specialization(b: &BiPoly) -> bool {
    let lead = b.leading();
    let Some(z0) = (1..=32).map(GaussianRational::from_integer).find(|z| !lead.eval(z).is_zero()) else {
        return false;
    };
    let f = Poly::new(b.coeffs().iter().map(|c| c.eval(&z0)).collect());
    f.gcd(&f.derivative()).is_constant()
}

pub(crate) fn square_free_bivariate(b: &BiPoly) -> BiPoly {
    if square_free_by_specialization(b) {
        return b.primitive().0;
    }
    let g = b.gcd(&b.derivative_w());
    if g.degree() == 0 {
        b.primitive().0
    } else {
        b.divide_primitive(&g)
    }
}

/// `P / gcd(P, ∂P/∂W)`, in canonical form.
pub fn square_free_part(p: &DefiningPolynomial) -> Result<DefiningPolynomial> {
    Ok(DefiningPolynomial::from_bivariate(&square_free_bivariate(&p.bivariate()?)))
}

fn binomial(n: usize, k: usize) -> GaussianRational {
    let mut acc = GaussianRational::one();
    for i in 0..k {
        acc = &acc * &GaussianRational::from_ratio((n - i) as i64, (i + 1) as i64);
    }
    acc
}

/// Lagrange basis on the nodes `0, 1, …, n`, each as coefficients in `W`.
fn lagrange_basis(n: usize) -> Vec<Vec<GaussianRational>> {
    (0..=n)
        .map(|k| {
            let mut coeffs = vec![GaussianRational::one()];
            let mut denom = GaussianRational::one();
            for m in (0..=n).filter(|&m| m != k) {
                let shift = GaussianRational::from_integer(-(m as i64));
                let mut next = vec![GaussianRational::zero(); coeffs.len() + 1];
                for (i, c) in coeffs.iter().enumerate() {
                    next[i + 1] = &next[i + 1] + c;
                    next[i] = &next[i] + &(c * &shift);
                }
                coeffs = next;
                denom = &denom * &GaussianRational::from_integer(k as i64 - m as i64);
            }
            let inv = denom.inv().expect("distinct nodes");
            coeffs.iter().map(|c| c * &inv).collect()
        })
        .collect()
}

fn defines_zero(b: &BiPoly) -> bool {
    b.coeffs().iter().rev().skip(1).all(Poly::is_zero)
}

/// Defining polynomial for `W_1 + W_2` or `W_1 W_2`, by interpolating the
/// eliminant `Res_{W_1}(P_1(W_1), Q(W, W_1))` at integer nodes in `W`.
pub fn alg_op(p1: &DefiningPolynomial, p2: &DefiningPolynomial, op: AlgOp) -> Result<DefiningPolynomial> {
    let b1 = p1.bivariate()?;
    let b2 = p2.bivariate()?;
    if op == AlgOp::Product && (defines_zero(&b1) || defines_zero(&b2)) {
        return Err(Error::ZeroFunction);
    }
    let (n1, n2) = (b1.degree(), b2.degree());
    let total = n1 * n2;
    let values: Vec<Poly> = (0..=total)
        .map(|node| {
            let w = GaussianRational::from_integer(node as i64);
            let q: Vec<Poly> = match op {
                AlgOp::Sum => (0..=n2)
                    .map(|i| {
                        let sign = if i % 2 == 0 { GaussianRational::one() } else { GaussianRational::from_integer(-1) };
                        (i..=n2).fold(Poly::zero(), |acc, j| {
                            let c = &(&binomial(j, i) * &w.pow((j - i) as u32)) * &sign;
                            &acc + &b2.coeffs()[j].scale(&c)
                        })
                    })
                    .collect(),
                AlgOp::Product => (0..=n2).map(|i| b2.coeffs()[n2 - i].scale(&w.pow((n2 - i) as u32))).collect(),
            };
            resultant_poly(b1.coeffs(), &q)
        })
        .collect();
    let basis = lagrange_basis(total);
    let mut coeffs = vec![Poly::zero(); total + 1];
    for (v, l) in values.iter().zip(&basis) {
        for (k, c) in l.iter().enumerate() {
            coeffs[k] = &coeffs[k] + &v.scale(c);
        }
    }
    let r = BiPoly::new(coeffs);
    if r.is_zero() {
        return Err(Error::ZeroFunction);
    }
    Ok(DefiningPolynomial::from_bivariate(&square_free_bivariate(&r)))
}

/// Defining polynomial of `-W`: `B_j = (-1)^{ν-j} A_j`.
pub fn alg_negate(p: &DefiningPolynomial) -> Result<DefiningPolynomial> {
    let nu = p.degree();
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if (nu - j) % 2 == 0 {
                return c.clone();
            }
            match c {
                Coefficient::Exact(f) => Coefficient::Exact(f.neg()),
                Coefficient::Numeric(e) => Coefficient::Numeric(AnalyticExpr::Neg(Arc::new(e.clone()))),
            }
        })
        .collect();
    canonical_if_exact(DefiningPolynomial::new(coeffs)?)
}

/// Defining polynomial of `1/W`: the coefficient list reversed.
pub fn alg_reciprocal(p: &DefiningPolynomial) -> Result<DefiningPolynomial> {
    if p.coeffs()[0].is_zero() {
        return Err(Error::NotInvertible);
    }
    let coeffs = p.coeffs().iter().rev().cloned().collect();
    canonical_if_exact(DefiningPolynomial::new(coeffs)?)
}

fn canonical_if_exact(p: DefiningPolynomial) -> Result<DefiningPolynomial> {
    match p.backend() {
        crate::field::Backend::Exact => p.canonical(),
        crate::field::Backend::Numeric => Ok(p),
    }
}
