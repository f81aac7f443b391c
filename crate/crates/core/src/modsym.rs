//! Exact modular symbols of weight k >= 2 for Gamma_0(N) in the Manin
//! presentation: the quotient by the two- and three-term relations, the
//! boundary map and its kernel, Hecke operators through coset action and
//! path decomposition, eigen-symbols with their evaluation functionals,
//! p-stabilization over the exact quadratic extension generated by a root
//! of the p-th Hecke polynomial, and twisted special-value sums.
//!
//! Coefficients are homogeneous polynomials of degree w = k-2 in (X, Y).
//! A matrix M = [a,b;c,d] acts on coefficients through the adjugate
//! substitution (M.P)(X,Y) = P(dX - bY, -cX + aY), which makes the period
//! pairing <f, P ox {alpha,beta}> = int f(z) P(z,1) dz satisfy
//! <f, M x> = <f|_k M, x> with the det^{k-1}-normalized slash and no stray
//! determinant powers.

use crate::oracles;
use crate::padic::{gauss_sum, CycloScalar, PadicCharacter, PadicError, PadicScalar, PrecisionProfile};
use crate::par;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModSymError {
    #[error("character parity does not match the weight")]
    ParityMismatch,
    #[error("only the trivial nebentypus is supported in this build")]
    UnsupportedCharacter,
    #[error("eigenspace not yet separated: dimension {0} > 1, supply more eigenvalues")]
    NotSeparated(usize),
    #[error("no eigenvector with the requested eigenvalues and sign")]
    NotFound,
    #[error("p divides the level; stabilize from a prime-to-p space")]
    PDividesLevel,
    #[error("Hecke polynomial has no root in Q_p (equal valuations); this build restricts to roots in Q_p")]
    RootNotRational,
    #[error("a_p = 0 is excluded")]
    ApZero,
    #[error("j = {0} is outside the critical range 1..k-1")]
    JOutOfRange(i64),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Nebentypus placeholder: the desk-scale build works with the trivial
/// character only, but the parity contract is kept explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirichletNebentypus {
    Trivial,
}

impl DirichletNebentypus {
    pub fn parity(&self) -> i32 {
        1
    }

    /// psi(n) for n prime to the level.
    pub fn value(&self, _n: i64) -> i64 {
        1
    }
}

// ---------------------------------------------------------------------------
// polynomial coefficients
// ---------------------------------------------------------------------------

/// Homogeneous polynomial of degree w in (X, Y): coefficient of X^i Y^{w-i}
/// at index i.
pub type HomPoly = Vec<BigRational>;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn monomial(w: usize, m: usize) -> HomPoly {
    let mut p = vec![BigRational::zero(); w + 1];
    p[m] = BigRational::one();
    p
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a: BigInt::from(a), b: BigInt::from(b), c: BigInt::from(c), d: BigInt::from(d) }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }
}

/// (M.P)(X,Y) = P(dX - bY, -cX + aY).
fn act(m: &Mat2, p: &HomPoly) -> HomPoly {
    let w = p.len() - 1;
    let mut out = vec![BigRational::zero(); w + 1];
    let d = BigRational::from_integer(m.d.clone());
    let nb = BigRational::from_integer(-m.b.clone());
    let nc = BigRational::from_integer(-m.c.clone());
    let a = BigRational::from_integer(m.a.clone());
    // first_pows[i] = (dX - bY)^i, second_pows[i] = (-cX + aY)^i
    let mut first_pows: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    let mut second_pows: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    for i in 1..=w {
        let prev = &first_pows[i - 1];
        let mut cur = vec![BigRational::zero(); i + 1];
        for (t, c) in prev.iter().enumerate() {
            cur[t + 1] += c * &d;
            cur[t] += c * &nb;
        }
        first_pows.push(cur);
        let prev = &second_pows[i - 1];
        let mut cur = vec![BigRational::zero(); i + 1];
        for (t, c) in prev.iter().enumerate() {
            cur[t + 1] += c * &nc;
            cur[t] += c * &a;
        }
        second_pows.push(cur);
    }
    for (i, coef) in p.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        let f = &first_pows[i];
        let s = &second_pows[w - i];
        for (t1, c1) in f.iter().enumerate() {
            if c1.is_zero() {
                continue;
            }
            for (t2, c2) in s.iter().enumerate() {
                if c2.is_zero() {
                    continue;
                }
                out[t1 + t2] += coef * c1 * c2;
            }
        }
    }
    out
}

/// Integer matrix of the action on the monomial basis: row m holds the
/// coefficients of act(mat, X^m Y^{w-m}).
fn act_matrix(m: &Mat2, w: usize) -> Vec<Vec<BigInt>> {
    let mut first_pows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    let mut second_pows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    let (d, nb, nc, a) = (m.d.clone(), -m.b.clone(), -m.c.clone(), m.a.clone());
    for i in 1..=w {
        let prev = &first_pows[i - 1];
        let mut cur = vec![BigInt::zero(); i + 1];
        for (t, c) in prev.iter().enumerate() {
            cur[t + 1] += c * &d;
            cur[t] += c * &nb;
        }
        first_pows.push(cur);
        let prev = &second_pows[i - 1];
        let mut cur = vec![BigInt::zero(); i + 1];
        for (t, c) in prev.iter().enumerate() {
            cur[t + 1] += c * &nc;
            cur[t] += c * &a;
        }
        second_pows.push(cur);
    }
    (0..=w)
        .map(|mm| {
            let mut row = vec![BigInt::zero(); w + 1];
            let f = &first_pows[mm];
            let s = &second_pows[w - mm];
            for (t1, c1) in f.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                for (t2, c2) in s.iter().enumerate() {
                    if c2.is_zero() {
                        continue;
                    }
                    row[t1 + t2] += c1 * c2;
                }
            }
            row
        })
        .collect()
}

// ---------------------------------------------------------------------------
// cusps and paths
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CuspPt {
    Infinity,
    Finite(BigRational),
}

impl CuspPt {
    pub fn from_ratio(num: BigInt, den: BigInt) -> CuspPt {
        if den.is_zero() {
            CuspPt::Infinity
        } else {
            CuspPt::Finite(BigRational::new(num, den))
        }
    }

    /// Primitive integer vector (a, c) with the cusp = a/c.
    fn primitive(&self) -> (BigInt, BigInt) {
        match self {
            CuspPt::Infinity => (BigInt::one(), BigInt::zero()),
            CuspPt::Finite(r) => (r.numer().clone(), r.denom().clone()),
        }
    }
}

pub fn moebius(m: &Mat2, x: &CuspPt) -> CuspPt {
    let (p, q) = x.primitive();
    CuspPt::from_ratio(&m.a * &p + &m.b * &q, &m.c * &p + &m.d * &q)
}

fn mod_floor_big(x: &BigInt, m: &BigInt) -> BigInt {
    if m.is_zero() {
        return x.clone();
    }
    num_integer::Integer::mod_floor(x, m)
}

/// Gamma_0(N)-equivalence of cusps, decided exactly: a carrying matrix
/// g_2 [1,t;0,1] g_1^{-1} lies in Gamma_0(N) for some integer t iff
/// t c1 c2 = c2 d1 - c1 d2 (mod N) is solvable, i.e. gcd(c1 c2, N)
/// divides the right-hand side.
pub fn cusps_equivalent(x: &CuspPt, y: &CuspPt, level: u64) -> bool {
    let n = BigInt::from(level);
    let (a1, c1) = x.primitive();
    let (a2, c2) = y.primitive();
    let ext = |a: &BigInt, c: &BigInt| -> BigInt {
        // d with a d - b c = 1 for some b
        let e = num_integer::Integer::extended_gcd(a, c);
        debug_assert!(e.gcd.is_one() || e.gcd == BigInt::from(-1));
        if e.gcd.is_one() {
            e.x
        } else {
            -e.x
        }
    };
    let d1 = ext(&a1, &c1);
    let d2 = ext(&a2, &c2);
    let rhs = mod_floor_big(&(&c2 * &d1 - &c1 * &d2), &n);
    let g = num_integer::Integer::gcd(&(&c1 * &c2), &n);
    if g.is_zero() {
        return rhs.is_zero();
    }
    (rhs % g).is_zero()
}

/// Unimodular matrices g_k with {infinity, r} = sum_k g_k {0, infinity},
/// via the continued-fraction convergents of r.
fn unimodular_path(r: &BigRational) -> Vec<Mat2> {
    let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    let mut out = Vec::new();
    let mut p_prev = BigInt::one(); // p_{-1}
    let mut q_prev = BigInt::zero();
    let mut p_prev2 = BigInt::zero(); // p_{-2}
    let mut q_prev2 = BigInt::one();
    let mut idx: i64 = -1;
    let (mut n_, mut d_) = (num, den);
    while !d_.is_zero() {
        let a = num_integer::Integer::div_floor(&n_, &d_);
        let rem = &n_ - &a * &d_;
        let p_cur = &a * &p_prev + &p_prev2;
        let q_cur = &a * &q_prev + &q_prev2;
        idx += 1;
        // {p_{k-1}/q_{k-1}, p_k/q_k} = g_k {0, infinity} with
        // g_k = [p_k, eps p_{k-1}; q_k, eps q_{k-1}], eps = (-1)^{k-1}
        let eps = if idx % 2 == 0 { BigInt::from(-1) } else { BigInt::one() };
        let g = Mat2 {
            a: p_cur.clone(),
            b: &eps * &p_prev,
            c: q_cur.clone(),
            d: &eps * &q_prev,
        };
        debug_assert!(g.det().is_one(), "path matrix must be unimodular");
        out.push(g);
        p_prev2 = std::mem::replace(&mut p_prev, p_cur);
        q_prev2 = std::mem::replace(&mut q_prev, q_cur);
        n_ = d_;
        d_ = rem;
    }
    out
}

// ---------------------------------------------------------------------------
// symbol space
// ---------------------------------------------------------------------------

/// Manin presentation of weight-k level-N modular symbols with trivial
/// nebentypus: generator classes, the quotient by the 2- and 3-term
/// relations, the boundary map and the star involution.
#[derive(Debug, Clone)]
pub struct SymbolSpace {
    pub level: u64,
    pub weight: u64,
    pub character: DirichletNebentypus,
    pub p1: Vec<(u64, u64)>,
    p1_index: BTreeMap<(u64, u64), usize>,
    /// quotient dimension (cuspidal plus boundary parts)
    pub dim: usize,
    /// rank of the relation matrix
    pub relation_rank: usize,
    /// generator index -> coordinates in the quotient basis
    gen_to_basis: Vec<Vec<BigRational>>,
    /// generator indices forming the quotient basis
    pub free_generators: Vec<usize>,
    /// vectors (in quotient coordinates) spanning the kernel of the boundary
    pub cuspidal_basis: Vec<Vec<BigRational>>,
    /// representatives of the cusp classes hit by the generators
    pub cusp_classes: Vec<CuspPt>,
}

fn p1_normalize(c: i64, d: i64, n: u64) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let n_ = n as i64;
    let c0 = c.rem_euclid(n_) as u64;
    let d0 = d.rem_euclid(n_) as u64;
    let mut best: Option<(u64, u64)> = None;
    for lam in 1..n {
        if num_integer::gcd(lam, n) != 1 {
            continue;
        }
        let cand = ((lam * c0) % n, (lam * d0) % n);
        if best.map(|b| cand < b).unwrap_or(true) {
            best = Some(cand);
        }
    }
    best.expect("unit exists")
}

fn p1_list(n: u64) -> Vec<(u64, u64)> {
    if n == 1 {
        return vec![(0, 0)];
    }
    let mut set = std::collections::BTreeSet::new();
    for c in 0..n {
        for d in 0..n {
            if num_integer::gcd(num_integer::gcd(c, d), n) != 1 {
                continue;
            }
            set.insert(p1_normalize(c as i64, d as i64, n));
        }
    }
    set.into_iter().collect()
}

/// Lift a projective point to an SL2(Z) matrix with congruent bottom row.
fn lift_to_sl2(c: u64, d: u64, n: u64) -> Mat2 {
    if n == 1 {
        return Mat2::from_i64(1, 0, 0, 1);
    }
    let c = c as i64;
    let mut d = d as i64;
    let n = n as i64;
    if c == 0 && d == 0 {
        unreachable!("not a projective point");
    }
    let mut guard = 0;
    while num_integer::gcd(c, d) != 1 {
        d += n;
        guard += 1;
        assert!(guard < 4 * n, "lift search failed");
    }
    let e = num_integer::Integer::extended_gcd(&BigInt::from(c), &BigInt::from(d));
    // e: x c + y d = 1; matrix [y, -x; c, d] has det y d + x c = 1
    Mat2 { a: e.y, b: -e.x, c: BigInt::from(c), d: BigInt::from(d) }
}

// exact rational RREF; returns pivot columns
fn rref(rows: &mut Vec<Vec<BigRational>>) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for cc in 0..ncols {
                    let t = &rows[r][cc] * &f;
                    rows[i][cc] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    pivots
}

/// Kernel basis of the row-major matrix m: vectors v with m v = 0.
pub(crate) fn kernel(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if m.is_empty() {
        return vec![];
    }
    let cols = m[0].len();
    let mut rows: Vec<Vec<BigRational>> = m.to_vec();
    let pivots = rref(&mut rows);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[ri][free].clone();
        }
        basis.push(v);
    }
    basis
}

impl SymbolSpace {
    fn weight_w(&self) -> usize {
        (self.weight - 2) as usize
    }

    fn gen_index(&self, m: usize, p1idx: usize) -> usize {
        p1idx * (self.weight_w() + 1) + m
    }

    fn p1_lookup(&self, c: &BigInt, d: &BigInt) -> usize {
        if self.level == 1 {
            return 0;
        }
        let n = BigInt::from(self.level);
        let cc = mod_floor_big(c, &n);
        let dd = mod_floor_big(d, &n);
        let to_u64 = |x: &BigInt| -> u64 {
            let dg = x.to_u64_digits().1;
            if dg.is_empty() {
                0
            } else {
                dg[0]
            }
        };
        let key = p1_normalize(to_u64(&cc) as i64, to_u64(&dd) as i64, self.level);
        *self.p1_index.get(&key).expect("projective point in table")
    }

    /// Class of the Manin generator [P, (c:d)] in quotient coordinates.
    fn manin_class(&self, p: &HomPoly, p1idx: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim];
        for (m, coef) in p.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let g = self.gen_index(m, p1idx);
            for (t, b) in self.gen_to_basis[g].iter().enumerate() {
                if !b.is_zero() {
                    out[t] += coef * b;
                }
            }
        }
        out
    }

    /// Class of P ox {infinity, r}: the path splits into unimodular pieces
    /// g{0, infinity}, each landing on the Manin generator of its bottom
    /// row with coefficient g^{-1}.P.
    pub fn path_class_from_infinity(&self, p: &HomPoly, r: &CuspPt) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim];
        let r = match r {
            CuspPt::Infinity => return out,
            CuspPt::Finite(r) => r,
        };
        for g in unimodular_path(r) {
            let ginv = Mat2 { a: g.d.clone(), b: -g.b.clone(), c: -g.c.clone(), d: g.a.clone() };
            let q = act(&ginv, p);
            let idx = self.p1_lookup(&g.c, &g.d);
            let cls = self.manin_class(&q, idx);
            for (t, v) in cls.into_iter().enumerate() {
                out[t] += v;
            }
        }
        out
    }

    /// Class of P ox {x, y}.
    pub fn path_class(&self, p: &HomPoly, x: &CuspPt, y: &CuspPt) -> Vec<BigRational> {
        let to = self.path_class_from_infinity(p, y);
        let from = self.path_class_from_infinity(p, x);
        to.into_iter().zip(from).map(|(a, b)| a - b).collect()
    }

    /// Classes of X^m Y^{w-m} ox {infinity, r} for every monomial at once:
    /// one continued-fraction decomposition, one integer action matrix per
    /// unimodular piece. Row m is the class of the m-th monomial.
    pub fn monomial_classes_from_infinity(&self, w: usize, r: &CuspPt) -> Vec<Vec<BigRational>> {
        let mut out = vec![vec![BigRational::zero(); self.dim]; w + 1];
        let r = match r {
            CuspPt::Infinity => return out,
            CuspPt::Finite(r) => r,
        };
        for g in unimodular_path(r) {
            let ginv = Mat2 { a: g.d.clone(), b: -g.b.clone(), c: -g.c.clone(), d: g.a.clone() };
            let amat = act_matrix(&ginv, w);
            let idx = self.p1_lookup(&g.c, &g.d);
            for m in 0..=w {
                for (s, coef) in amat[m].iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let gen = self.gen_index(s, idx);
                    let cr = BigRational::from_integer(coef.clone());
                    for (t, b) in self.gen_to_basis[gen].iter().enumerate() {
                        if !b.is_zero() {
                            out[m][t] += &cr * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Same, for the path {x, y}.
    pub fn monomial_classes(&self, w: usize, x: &CuspPt, y: &CuspPt) -> Vec<Vec<BigRational>> {
        let mut to = self.monomial_classes_from_infinity(w, y);
        let from = self.monomial_classes_from_infinity(w, x);
        for (row_t, row_f) in to.iter_mut().zip(from) {
            for (a, b) in row_t.iter_mut().zip(row_f) {
                *a -= b;
            }
        }
        to
    }

    /// Matrix (row-major, acting on column vectors) of x -> sum_i delta_i x
    /// over coset representatives.
    fn coset_operator(&self, cosets: &[Mat2]) -> Vec<Vec<BigRational>> {
        let w = self.weight_w();
        let cols: Vec<Vec<BigRational>> = par::map_indices(self.dim, |bidx| {
            let gen = self.free_generators[bidx];
            let p1idx = gen / (w + 1);
            let m = gen % (w + 1);
            let (c, d) = self.p1[p1idx];
            let g = lift_to_sl2(c, d, self.level);
            let base_poly = act(&g, &monomial(w, m));
            let x0 = moebius(&g, &CuspPt::Finite(BigRational::zero()));
            let x1 = moebius(&g, &CuspPt::Infinity);
            let mut col = vec![BigRational::zero(); self.dim];
            for delta in cosets {
                let q = act(delta, &base_poly);
                let cls = self.path_class(&q, &moebius(delta, &x0), &moebius(delta, &x1));
                for (t, v) in cls.into_iter().enumerate() {
                    col[t] += v;
                }
            }
            col
        });
        let mut mat = vec![vec![BigRational::zero(); self.dim]; self.dim];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                mat[i][j] = v.clone();
            }
        }
        mat
    }

    /// Hecke operator: T_ell for ell prime to the level, U_ell otherwise.
    pub fn hecke_matrix(&self, ell: u64) -> Vec<Vec<BigRational>> {
        let mut cosets: Vec<Mat2> = (0..ell)
            .map(|t| Mat2::from_i64(1, t as i64, 0, ell as i64))
            .collect();
        if self.level % ell != 0 {
            cosets.push(Mat2::from_i64(ell as i64, 0, 0, 1));
        }
        self.coset_operator(&cosets)
    }

    /// The reduced relation data: row g is the expression of the g-th
    /// Manin generator in the quotient basis.
    pub fn generator_basis_rows(&self) -> &[Vec<BigRational>] {
        &self.gen_to_basis
    }

    /// The star involution from z -> -zbar: [P,(c:d)] -> [P(X,-Y), (-c:d)].
    pub fn star_involution(&self) -> Vec<Vec<BigRational>> {
        let w = self.weight_w();
        let mut mat = vec![vec![BigRational::zero(); self.dim]; self.dim];
        for (bidx, &gen) in self.free_generators.iter().enumerate() {
            let p1idx = gen / (w + 1);
            let m = gen % (w + 1);
            let (c, d) = self.p1[p1idx];
            let mut p = monomial(w, m);
            if (w - m) % 2 == 1 {
                p[m] = -p[m].clone();
            }
            let idx = self.p1_lookup(&BigInt::from(-(c as i64)), &BigInt::from(d as i64));
            let cls = self.manin_class(&p, idx);
            for (t, v) in cls.into_iter().enumerate() {
                mat[t][bidx] = v;
            }
        }
        mat
    }
}

/// Builds the presented space: generators, relations, quotient, boundary.
pub fn build_space(
    level: u64,
    weight: u64,
    character: DirichletNebentypus,
) -> Result<SymbolSpace, ModSymError> {
    if weight < 2 {
        return Err(ModSymError::ParityMismatch);
    }
    let parity_ok = (weight % 2 == 0 && character.parity() == 1)
        || (weight % 2 == 1 && character.parity() == -1);
    if !parity_ok {
        return Err(ModSymError::ParityMismatch);
    }
    let w = (weight - 2) as usize;
    let p1 = p1_list(level);
    let p1_index: BTreeMap<(u64, u64), usize> =
        p1.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let ngens = p1.len() * (w + 1);

    // relation rows over the generators; the three matrices below are the
    // adjugate actions of sigma^{-1}, tau^{-1}, tau^{-2}
    let sigma_inv_act = |p: &HomPoly| act(&Mat2::from_i64(0, 1, -1, 0), p); // P(-Y, X)
    let tau_inv_act = |p: &HomPoly| act(&Mat2::from_i64(-1, 1, -1, 0), p); // P(-Y, X-Y)
    let tau_inv2_act = |p: &HomPoly| act(&Mat2::from_i64(0, -1, 1, -1), p); // P(-X+Y, -X)

    let norm = |c: i64, d: i64| -> usize {
        if level == 1 {
            0
        } else {
            p1_index[&p1_normalize(c, d, level)]
        }
    };
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let push_terms = |rows: &mut Vec<Vec<BigRational>>, terms: Vec<(HomPoly, usize)>| {
        let mut row = vec![BigRational::zero(); ngens];
        for (poly, p1idx) in terms {
            for (m, coef) in poly.iter().enumerate() {
                if !coef.is_zero() {
                    row[p1idx * (w + 1) + m] += coef;
                }
            }
        }
        if row.iter().any(|v| !v.is_zero()) {
            rows.push(row);
        }
    };
    for (idx, &(c, d)) in p1.iter().enumerate() {
        let (c, d) = (c as i64, d as i64);
        for m in 0..=w {
            let p = monomial(w, m);
            // x + x sigma = 0
            push_terms(&mut rows, vec![(p.clone(), idx), (sigma_inv_act(&p), norm(d, -c))]);
            // x + x tau + x tau^2 = 0
            push_terms(
                &mut rows,
                vec![
                    (p.clone(), idx),
                    (tau_inv_act(&p), norm(d, -c - d)),
                    (tau_inv2_act(&p), norm(-c - d, c)),
                ],
            );
        }
    }

    let mut rel = rows;
    let pivots = rref(&mut rel);
    let rank = pivots.len();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let free_generators: Vec<usize> = (0..ngens).filter(|g| !pivot_set.contains(g)).collect();
    let dim = free_generators.len();
    let free_pos: BTreeMap<usize, usize> =
        free_generators.iter().enumerate().map(|(i, g)| (*g, i)).collect();

    let mut gen_to_basis = vec![vec![BigRational::zero(); dim]; ngens];
    for (&g, &pos) in &free_pos {
        gen_to_basis[g][pos] = BigRational::one();
    }
    for (ri, &pc) in pivots.iter().enumerate() {
        for (&g, &pos) in &free_pos {
            if !rel[ri][g].is_zero() {
                gen_to_basis[pc][pos] = -rel[ri][g].clone();
            }
        }
    }

    let mut space = SymbolSpace {
        level,
        weight,
        character,
        p1,
        p1_index,
        dim,
        relation_rank: rank,
        gen_to_basis,
        free_generators,
        cuspidal_basis: vec![],
        cusp_classes: vec![],
    };

    // boundary: delta[P, (c:d)] = P(1,0) [a/c] - P(0,1) [b/d] for the lift
    // [a,b;c,d]; only the extreme monomials hit the cusps
    let mut cusp_classes: Vec<CuspPt> = Vec::new();
    let class_of = |x: CuspPt, classes: &mut Vec<CuspPt>| -> usize {
        for (i, y) in classes.iter().enumerate() {
            if cusps_equivalent(&x, y, level) {
                return i;
            }
        }
        classes.push(x);
        classes.len() - 1
    };
    let mut gen_boundaries: Vec<Vec<(usize, BigRational)>> = Vec::with_capacity(ngens);
    for &(c, d) in &space.p1 {
        let g = lift_to_sl2(c, d, level);
        let ci = class_of(CuspPt::from_ratio(g.a.clone(), g.c.clone()), &mut cusp_classes);
        let cj = class_of(CuspPt::from_ratio(g.b.clone(), g.d.clone()), &mut cusp_classes);
        for m in 0..=w {
            let mut entries = Vec::new();
            if m == w {
                entries.push((ci, BigRational::one()));
            }
            if m == 0 {
                entries.push((cj, -BigRational::one()));
            }
            gen_boundaries.push(entries);
        }
    }
    let ncusps = cusp_classes.len();
    let mut bmat = vec![vec![BigRational::zero(); dim]; ncusps];
    for (bidx, &gen) in space.free_generators.iter().enumerate() {
        for (cls, coef) in &gen_boundaries[gen] {
            bmat[*cls][bidx] += coef;
        }
    }
    space.cuspidal_basis = kernel(&bmat);
    space.cusp_classes = cusp_classes;
    Ok(space)
}

// ---------------------------------------------------------------------------
// eigen-symbols
// ---------------------------------------------------------------------------

/// A normalized Hecke eigenvector with its evaluation functional.
#[derive(Debug, Clone)]
pub struct EigenSymbol {
    /// coordinates in the quotient basis, first nonzero coordinate = 1
    pub coords: Vec<BigRational>,
    /// left functional u with u(T x) = a_ell u(x) and u(coords) = 1
    pub dual: Vec<BigRational>,
    pub eigenvalues: BTreeMap<u64, BigRational>,
    pub sign: i8,
}

pub(crate) fn transpose(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut t = vec![vec![BigRational::zero(); rows]; cols];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = v.clone();
        }
    }
    t
}

pub(crate) fn mat_sub_scalar(m: &[Vec<BigRational>], a: &BigRational) -> Vec<Vec<BigRational>> {
    let mut out = m.to_vec();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= a;
    }
    out
}

pub fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let p = b[0].len();
    let mut out = vec![vec![BigRational::zero(); p]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..p {
                if b[k][j].is_zero() {
                    continue;
                }
                let t = aik * &b[k][j];
                out[i][j] += t;
            }
        }
    }
    out
}

fn stack(mats: Vec<Vec<Vec<BigRational>>>) -> Vec<Vec<BigRational>> {
    mats.into_iter().flatten().collect()
}

/// Finds the normalized simultaneous eigenvector with the given sign, plus
/// the matching left functional.
pub fn find_eigensymbol(
    space: &SymbolSpace,
    eigenvalues: &[(u64, BigRational)],
    sign: i8,
) -> Result<EigenSymbol, ModSymError> {
    assert!(sign == 1 || sign == -1);
    let star = space.star_involution();
    let sign_rat = rat(sign as i64);
    let mut constraints = vec![mat_sub_scalar(&star, &sign_rat)];
    let mut tmats = Vec::new();
    for (ell, a) in eigenvalues {
        let t = space.hecke_matrix(*ell);
        constraints.push(mat_sub_scalar(&t, a));
        tmats.push(t);
    }
    let ker = kernel(&stack(constraints));
    match ker.len() {
        0 => return Err(ModSymError::NotFound),
        1 => {}
        d => return Err(ModSymError::NotSeparated(d)),
    }
    let mut v = ker.into_iter().next().unwrap();
    let lead = v.iter().find(|x| !x.is_zero()).cloned().unwrap();
    for x in v.iter_mut() {
        *x /= &lead;
    }
    let mut tconstraints = vec![mat_sub_scalar(&transpose(&star), &sign_rat)];
    for ((_, a), t) in eigenvalues.iter().zip(tmats.iter()) {
        tconstraints.push(mat_sub_scalar(&transpose(t), a));
    }
    let lker = kernel(&stack(tconstraints));
    if lker.len() != 1 {
        return Err(ModSymError::NotSeparated(lker.len().max(1)));
    }
    let mut u = lker.into_iter().next().unwrap();
    let pairing: BigRational = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    if pairing.is_zero() {
        return Err(ModSymError::NotFound);
    }
    for x in u.iter_mut() {
        *x /= &pairing;
    }
    Ok(EigenSymbol {
        coords: v,
        dual: u,
        eigenvalues: eigenvalues.iter().cloned().collect(),
        sign,
    })
}

impl EigenSymbol {
    /// Period functional on P ox {x, y}, in the pinned normalization.
    pub fn eval_path(&self, space: &SymbolSpace, p: &HomPoly, x: &CuspPt, y: &CuspPt) -> BigRational {
        let cls = space.path_class(p, x, y);
        self.dual.iter().zip(cls.iter()).map(|(a, b)| a * b).sum()
    }
}

// ---------------------------------------------------------------------------
// the quadratic extension generated by a root of the Hecke polynomial
// ---------------------------------------------------------------------------

/// Element a + b alpha of Q(alpha), alpha a root of X^2 - trace X + norm.
/// Exact arithmetic; the p-adic embedding sends alpha to its Hensel value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QAlpha {
    pub a: BigRational,
    pub b: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QAlphaCtx {
    pub trace: BigRational,
    pub norm: BigRational,
}

impl QAlpha {
    pub fn zero() -> Self {
        QAlpha { a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one() -> Self {
        QAlpha { a: BigRational::one(), b: BigRational::zero() }
    }

    pub fn from_rat(a: BigRational) -> Self {
        QAlpha { a, b: BigRational::zero() }
    }

    pub fn alpha() -> Self {
        QAlpha { a: BigRational::zero(), b: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QAlpha { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QAlpha { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QAlpha { a: &self.a * r, b: &self.b * r }
    }

    pub fn mul(&self, o: &Self, ctx: &QAlphaCtx) -> Self {
        // alpha^2 = trace alpha - norm
        let a = &self.a * &o.a - &self.b * &o.b * &ctx.norm;
        let b = &self.a * &o.b + &self.b * &o.a + &self.b * &o.b * &ctx.trace;
        QAlpha { a, b }
    }

    pub fn conj(&self, ctx: &QAlphaCtx) -> Self {
        QAlpha { a: &self.a + &self.b * &ctx.trace, b: -self.b.clone() }
    }

    pub fn inv(&self, ctx: &QAlphaCtx) -> Self {
        let c = self.conj(ctx);
        let n = self.mul(&c, ctx);
        debug_assert!(n.b.is_zero());
        c.scale(&n.a.recip())
    }

    pub fn pow(&self, mut e: u64, ctx: &QAlphaCtx) -> Self {
        let mut acc = QAlpha::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            base = base.mul(&base, ctx);
            e >>= 1;
        }
        acc
    }

    /// p-adic image under alpha -> alpha_p.
    pub fn embed(&self, alpha_p: &PadicScalar, prof: &PrecisionProfile) -> Result<PadicScalar, PadicError> {
        let ra = PadicScalar::from_ratio(self.a.numer().clone(), self.a.denom().clone(), prof)?;
        let rb = PadicScalar::from_ratio(self.b.numer().clone(), self.b.denom().clone(), prof)?;
        Ok(ra.add(&rb.mul(alpha_p, prof), prof))
    }
}

// ---------------------------------------------------------------------------
// p-stabilization
// ---------------------------------------------------------------------------

/// Which root of X^2 - a_p X + psi(p) p^{k-1} to stabilize with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootChoice {
    /// the root of smaller valuation (the unit root in the ordinary case)
    SmallSlope,
    /// the root of larger valuation
    LargeSlope,
}

/// A p-stabilized eigenform: the prime-to-p eigen-symbol pair together with
/// the chosen root, kept exactly in Q(alpha), and its p-adic realization.
#[derive(Debug, Clone)]
pub struct StabilizedForm {
    pub plus: EigenSymbol,
    pub minus: EigenSymbol,
    pub p: u64,
    pub weight: u64,
    pub ap: BigRational,
    pub psi_p: i64,
    pub ctx: QAlphaCtx,
    /// the chosen root as the formal generator alpha
    pub alpha: QAlpha,
    /// the conjugate root trace - alpha
    pub beta: QAlpha,
    /// Hensel realization of the chosen root in Q_p
    pub alpha_p: PadicScalar,
    pub slope: i64,
}

/// Hensel lift of the smaller-valuation root of x^2 - t x + n when the two
/// valuations differ; errors out in the equal-valuation case.
fn hensel_small_root(
    t: &BigRational,
    n: &BigRational,
    prof: &PrecisionProfile,
) -> Result<PadicScalar, ModSymError> {
    let tp = PadicScalar::from_ratio(t.numer().clone(), t.denom().clone(), prof)?;
    let np = PadicScalar::from_ratio(n.numer().clone(), n.denom().clone(), prof)?;
    let v = tp.valuation(prof).ok_or(ModSymError::ApZero)?;
    let vn = np.valuation(prof).unwrap_or(i64::MAX);
    if 2 * v >= vn {
        return Err(ModSymError::RootNotRational);
    }
    // x = p^v u: u^2 - (t/p^v) u + n/p^{2v} = 0, unit middle coefficient
    let t1 = tp.mul_p_power(-v);
    let n1 = np.mul_p_power(-2 * v);
    let mut u = t1.clone();
    for _ in 0..prof.cap_n + 2 {
        let f = u.mul(&u, prof).sub(&t1.mul(&u, prof), prof).add(&n1, prof);
        let fp = u.mul_u64(2, prof).sub(&t1, prof);
        let step = f.div(&fp, prof).map_err(ModSymError::Padic)?;
        let next = u.sub(&step, prof);
        if next.eq_at_precision(&u, prof) {
            u = next;
            break;
        }
        u = next;
    }
    Ok(u.mul_p_power(v))
}

/// p-stabilizes the eigen-symbol pair at p, choosing a root of the p-th
/// Hecke polynomial. Requires p prime to the level and the stored a_p.
pub fn p_stabilize(
    plus: &EigenSymbol,
    minus: &EigenSymbol,
    space: &SymbolSpace,
    p: u64,
    which: RootChoice,
    prof: &PrecisionProfile,
) -> Result<StabilizedForm, ModSymError> {
    if space.level % p == 0 {
        return Err(ModSymError::PDividesLevel);
    }
    let ap = plus.eigenvalues.get(&p).cloned().ok_or(ModSymError::NotFound)?;
    if ap.is_zero() {
        return Err(ModSymError::ApZero);
    }
    let k = space.weight;
    let psi_p = space.character.value(p as i64);
    let norm = rat(psi_p) * BigRational::from_integer(BigInt::from(p).pow(k as u32 - 1));
    let ctx = QAlphaCtx { trace: ap.clone(), norm: norm.clone() };
    let small = hensel_small_root(&ap, &norm, prof)?;
    let v_small = small.valuation(prof).unwrap();
    let k1 = k as i64 - 1;
    let beta = QAlpha { a: ap.clone(), b: -BigRational::one() };
    let (alpha_p, slope) = match which {
        RootChoice::SmallSlope => (small, v_small),
        RootChoice::LargeSlope => {
            let tp = PadicScalar::from_ratio(ap.numer().clone(), ap.denom().clone(), prof)
                .map_err(ModSymError::Padic)?;
            (tp.sub(&small, prof), k1 - v_small)
        }
    };
    Ok(StabilizedForm {
        plus: plus.clone(),
        minus: minus.clone(),
        p,
        weight: k,
        ap,
        psi_p,
        ctx,
        alpha: QAlpha::alpha(),
        beta,
        alpha_p,
        slope,
    })
}

impl StabilizedForm {
    /// Evaluation of the stabilized symbol on P ox {x,y}, valued in
    /// Q(alpha): lambda_f = lambda_g - beta p^{1-k} lambda_g(pi .), with
    /// pi = [p,0;0,1].
    pub fn eval(&self, space: &SymbolSpace, sign: i8, p: &HomPoly, x: &CuspPt, y: &CuspPt) -> QAlpha {
        let eig = if sign >= 0 { &self.plus } else { &self.minus };
        let base = eig.eval_path(space, p, x, y);
        let pi = Mat2::from_i64(self.p as i64, 0, 0, 1);
        let moved_p = act(&pi, p);
        let shifted = eig.eval_path(space, &moved_p, &moebius(&pi, x), &moebius(&pi, y));
        let pk1 = BigRational::new(BigInt::one(), BigInt::from(self.p).pow(self.weight as u32 - 1));
        let corr = self.beta.scale(&(shifted * pk1));
        QAlpha::from_rat(base).sub(&corr)
    }

    /// Batched evaluation: for each supplied polynomial, both sign values
    /// at once, sharing the two path decompositions (plain and pi-moved)
    /// across all polynomials. Output: (plus, minus) per polynomial.
    pub fn eval_many(
        &self,
        space: &SymbolSpace,
        polys: &[HomPoly],
        x: &CuspPt,
        y: &CuspPt,
    ) -> Vec<(QAlpha, QAlpha)> {
        let w = (self.weight - 2) as usize;
        let base_cls = space.monomial_classes(w, x, y);
        let pi = Mat2::from_i64(self.p as i64, 0, 0, 1);
        let moved_cls = space.monomial_classes(w, &moebius(&pi, x), &moebius(&pi, y));
        let pi_mat = act_matrix(&pi, w);
        let pk1 = BigRational::new(BigInt::one(), BigInt::from(self.p).pow(self.weight as u32 - 1));
        polys
            .iter()
            .map(|p| {
                // class of p on the plain path and of pi.p on the moved path
                let mut v_base = vec![BigRational::zero(); space.dim];
                let mut v_moved = vec![BigRational::zero(); space.dim];
                for (m, coef) in p.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    for (t, b) in base_cls[m].iter().enumerate() {
                        if !b.is_zero() {
                            v_base[t] += coef * b;
                        }
                    }
                    for (s, ac) in pi_mat[m].iter().enumerate() {
                        if ac.is_zero() {
                            continue;
                        }
                        let c = coef * BigRational::from_integer(ac.clone());
                        for (t, b) in moved_cls[s].iter().enumerate() {
                            if !b.is_zero() {
                                v_moved[t] += &c * b;
                            }
                        }
                    }
                }
                let mut out = Vec::with_capacity(2);
                for eig in [&self.plus, &self.minus] {
                    let base: BigRational =
                        eig.dual.iter().zip(v_base.iter()).map(|(a, b)| a * b).sum();
                    let shifted: BigRational =
                        eig.dual.iter().zip(v_moved.iter()).map(|(a, b)| a * b).sum();
                    let corr = self.beta.scale(&(shifted * &pk1));
                    out.push(QAlpha::from_rat(base).sub(&corr));
                }
                (out.swap_remove(0), out.swap_remove(0))
            })
            .collect()
    }

    /// U_p-eigenvalue defect: sum of the coset-moved evaluations minus
    /// alpha times the plain one; zero exactly in Q(alpha) when the
    /// stabilization is consistent.
    pub fn up_eigen_defect(&self, space: &SymbolSpace, sign: i8, p: &HomPoly, x: &CuspPt, y: &CuspPt) -> QAlpha {
        let mut acc = QAlpha::zero();
        for t in 0..self.p {
            let m = Mat2::from_i64(1, t as i64, 0, self.p as i64);
            let q = act(&m, p);
            let term = self.eval(space, sign, &q, &moebius(&m, x), &moebius(&m, y));
            acc = acc.add(&term);
        }
        let want = self.alpha.mul(&self.eval(space, sign, p, x, y), &self.ctx);
        acc.sub(&want)
    }
}

// ---------------------------------------------------------------------------
// algebraic special values
// ---------------------------------------------------------------------------

/// The twisted symbol sum with windows recentered at the twisting cusps:
/// sum_{b mod m} phi(b) lambda_f^{sgn}((z - b/m)^{j-1}; {oo, b/m}) with
/// m = Cond(phi). This is the pinned realization of
/// (-1)^j (j-1)! tau(phi) L(f, phi^{-1}, j) / ((2 pi i)^j Omega^{sgn(j,phi)})
/// (the twisted form's period unfolds into exactly these recentered
/// integrals), embedded p-adically.
pub fn twisted_symbol_sum(
    form: &StabilizedForm,
    space: &SymbolSpace,
    j: i64,
    phi: &PadicCharacter,
    prof: &PrecisionProfile,
) -> Result<CycloScalar, ModSymError> {
    let k = space.weight as i64;
    if j < 1 || j > k - 1 {
        return Err(ModSymError::JOutOfRange(j));
    }
    let w = (space.weight - 2) as usize;
    let sign = crate::padic::sgn(j, phi) as i8;
    let m = phi.conductor(prof);
    if m == 1 {
        let window = monomial(w, (j - 1) as usize);
        let v = form.eval(space, sign, &window, &CuspPt::Infinity, &CuspPt::Finite(BigRational::zero()));
        return Ok(CycloScalar::from_scalar(v.embed(&form.alpha_p, prof)?));
    }
    let mut acc = CycloScalar::zero(prof.p, phi.wild_level);
    for b in 1..m {
        if b % prof.p == 0 {
            continue;
        }
        let val = phi.eval_finite_at_u64(b, prof)?;
        // integral window (m X - b Y)^{j-1} Y^{w-j+1} = m^{j-1} (z - b/m)^{j-1}
        let window = recentered_window(w, m, b, (j - 1) as usize);
        let cusp = CuspPt::Finite(BigRational::new(BigInt::from(b), BigInt::from(m)));
        let lam = form.eval(space, sign, &window, &CuspPt::Infinity, &cusp);
        acc = acc.add(&val.scalar_mul(&lam.embed(&form.alpha_p, prof)?, prof), prof);
    }
    // divide out the m^{j-1} from the integral windows
    let mexp = phi.conductor_exponent();
    Ok(acc.scalar_mul(
        &PadicScalar::one(prof).mul_p_power(-((mexp as i64) * (j - 1))),
        prof,
    ))
}

/// (c X - b Y)^{d} Y^{w-d} as an integral homogeneous polynomial.
pub fn recentered_window(w: usize, c: u64, b: u64, d: usize) -> HomPoly {
    let mut out = vec![BigRational::zero(); w + 1];
    let cc = BigInt::from(c);
    let nb = BigInt::from(-(b as i64));
    let mut binom = BigInt::one();
    for (s, slot) in out.iter_mut().enumerate().take(d + 1) {
        let term = &binom * cc.pow(s as u32) * nb.pow((d - s) as u32);
        *slot = BigRational::from_integer(term);
        binom = &binom * BigInt::from((d - s) as i64) / BigInt::from(s as i64 + 1);
    }
    out
}

/// The normalized algebraic special value: the twisted sum divided by
/// (-1)^j (j-1)! tau(phi), i.e. the pinned realization of
/// L(f, phi^{-1}, j) / ((2 pi i)^j Omega^{sgn(j, phi)}).
pub fn algebraic_l_value(
    form: &StabilizedForm,
    space: &SymbolSpace,
    j: i64,
    phi: &PadicCharacter,
    prof: &PrecisionProfile,
) -> Result<CycloScalar, ModSymError> {
    let raw = twisted_symbol_sum(form, space, j, phi, prof)?;
    let fin = phi.finite_part();
    let tau = gauss_sum(&fin, prof)?;
    // 1/tau = phi(-1) tau-bar / Cond
    let taubar = gauss_sum(&fin.conjugate_finite(prof), prof)?;
    let cond = PadicScalar::from_u64(phi.conductor(prof), prof);
    let tau_inv = taubar
        .scalar_mul(&cond.inv(prof).map_err(ModSymError::Padic)?, prof)
        .scalar_mul(&PadicScalar::from_i64(phi.finite_parity() as i64, prof), prof);
    debug_assert!(tau.mul(&tau_inv, prof).eq_at_precision(&CycloScalar::one(prof), prof));
    let mut fact = BigInt::one();
    for t in 1..j {
        fact *= t;
    }
    let sign = if j % 2 == 0 { 1 } else { -1 };
    let scale = PadicScalar::from_ratio(BigInt::from(sign), fact, prof).map_err(ModSymError::Padic)?;
    Ok(raw.mul(&tau_inv, prof).scalar_mul(&scale, prof))
}

/// Presented cuspidal dimension against the classical formula.
pub fn cuspidal_dimension_matches(space: &SymbolSpace) -> bool {
    space.cuspidal_basis.len() == 2 * oracles::dim_cusp_forms_gamma0(space.level, space.weight)
}
