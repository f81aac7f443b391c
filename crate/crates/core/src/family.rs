//! Weight-direction bookkeeping: the p-adic disc of weights with its
//! pinned chart, exact interpolation of Fourier coefficients through
//! arithmetic points, CRT gluing of per-weight L-functions modulo the
//! ideal cut out by finitely many points, the p-adic period ledger, and
//! the ordinary projector cut out by iterating U_p.
//!
//! The chart is fixed globally: the arithmetic point k sits at
//! w_k = (1+p)^{k-k0} - 1, and a point is inside the disc of radius
//! p^{-r} when ord(w_k) >= r.

use crate::distributions::{HhCycElement, HhSeries};
use crate::iwasawa::LambdaCycElement;
use crate::modsym::SymbolSpace;
use crate::padic::{mod_inverse, PadicError, PadicScalar, PrecisionProfile};
use crate::plfn::LpBody;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("need at least {0} member weights")]
    TooFewMembers(usize),
    #[error("weight {0} is not an arithmetic point of the disc")]
    NotArithmetic(i64),
    #[error("weights must be distinct, {0} repeats")]
    RepeatedWeight(i64),
    #[error("fixture is not a plausible family slice: coefficient {n} at weights {k1}, {k2} misses the congruence (needs valuation >= {needed}, got {got:?})")]
    CoherenceViolation { n: usize, k1: i64, k2: i64, needed: i64, got: Option<i64> },
    #[error("slope of member {k} is {got}, family declares {want}")]
    SlopeMismatch { k: i64, got: i64, want: i64 },
    #[error("per-weight objects at {k1} and {k2} are incompatible at branch {branch}, coefficient {coeff}: difference needs valuation >= {needed}, got {got:?}")]
    IncompatiblePair { k1: i64, k2: i64, branch: usize, coeff: usize, needed: i64, got: Option<i64> },
    #[error("per-weight objects have mismatched shapes")]
    ShapeMismatch,
    #[error("weight {0} is outside the certified point set")]
    OutsideCertified(i64),
    #[error("U_p matrix is not p-integral on this basis")]
    NonIntegralOperator,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

// ---------------------------------------------------------------------------
// the weight disc and its chart
// ---------------------------------------------------------------------------

/// Disc of weights around k0 with radius exponent r, under the pinned
/// chart k -> w_k = (1+p)^{k-k0} - 1.
#[derive(Debug, Clone, Copy)]
pub struct WeightDisc {
    pub p: u64,
    pub k0: i64,
    pub r: u32,
}

impl WeightDisc {
    pub fn chart(&self, k: i64, prof: &PrecisionProfile) -> PadicScalar {
        let gen = PadicScalar::from_u64(self.p + 1, prof);
        let val = gen.pow_i64(k - self.k0, prof).expect("1+p is a unit");
        val.sub(&PadicScalar::one(prof), prof)
    }

    /// Integer weights inside the disc: ord(w_k) >= r, i.e.
    /// 1 + ord_p(k - k0) >= r.
    pub fn is_arithmetic(&self, k: i64) -> bool {
        if k == self.k0 {
            return true;
        }
        let mut d = (k - self.k0).unsigned_abs();
        let mut v = 1u32;
        while d % self.p == 0 {
            d /= self.p;
            v += 1;
        }
        v >= self.r
    }
}

// ---------------------------------------------------------------------------
// truncated series in the weight variable
// ---------------------------------------------------------------------------

/// Polynomial/truncated series in the chart variable W.
#[derive(Debug, Clone)]
pub struct FamilySeries {
    pub coeffs: Vec<PadicScalar>,
}

impl FamilySeries {
    pub fn zero(len: usize) -> Self {
        FamilySeries { coeffs: vec![PadicScalar::zero(); len.max(1)] }
    }

    pub fn constant(c: PadicScalar, len: usize) -> Self {
        let mut s = Self::zero(len);
        s.coeffs[0] = c;
        s
    }

    pub fn eval(&self, w: &PadicScalar, prof: &PrecisionProfile) -> PadicScalar {
        let mut acc = PadicScalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(w, prof).add(c, prof);
        }
        acc
    }

    pub fn add(&self, o: &Self, prof: &PrecisionProfile) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Self::zero(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(PadicScalar::zero);
            let b = o.coeffs.get(i).cloned().unwrap_or_else(PadicScalar::zero);
            out.coeffs[i] = a.add(&b, prof);
        }
        out
    }

    pub fn scalar_mul(&self, s: &PadicScalar, prof: &PrecisionProfile) -> Self {
        FamilySeries { coeffs: self.coeffs.iter().map(|c| c.mul(s, prof)).collect() }
    }

    pub fn mul(&self, o: &Self, prof: &PrecisionProfile) -> Self {
        let mut out = Self::zero(self.coeffs.len() + o.coeffs.len() - 1);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_at_precision() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b, prof), prof);
            }
        }
        out
    }
}

/// The ideal cut out by a finite set of arithmetic points: the product of
/// the monic linear factors (W - w_k).
#[derive(Debug, Clone)]
pub struct IdealFamily {
    pub points: Vec<i64>,
    pub generator: FamilySeries,
}

impl IdealFamily {
    pub fn new(disc: &WeightDisc, points: &[i64], prof: &PrecisionProfile) -> Result<Self, FamilyError> {
        let mut seen = std::collections::BTreeSet::new();
        let mut gen = FamilySeries::constant(PadicScalar::one(prof), 1);
        for &k in points {
            if !disc.is_arithmetic(k) {
                return Err(FamilyError::NotArithmetic(k));
            }
            if !seen.insert(k) {
                return Err(FamilyError::RepeatedWeight(k));
            }
            let wk = disc.chart(k, prof);
            let lin = FamilySeries { coeffs: vec![wk.neg(prof), PadicScalar::one(prof)] };
            gen = gen.mul(&lin, prof);
        }
        Ok(IdealFamily { points: points.to_vec(), generator: gen })
    }

    /// Exact membership test for a further point: the generator vanishes
    /// at its chart value iff the point is among the nodes.
    pub fn contains_point(&self, disc: &WeightDisc, k: i64, prof: &PrecisionProfile) -> bool {
        self.generator.eval(&disc.chart(k, prof), prof).is_zero_at_precision()
    }
}

// ---------------------------------------------------------------------------
// family fixtures and coefficient interpolation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub k: i64,
    /// valuation of the chosen U_p root at this weight
    pub slope: i64,
    /// a_1 .. a_bound as exact rationals
    pub coefficients: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub struct FamilyFixture {
    pub disc: WeightDisc,
    pub slope: i64,
    pub members: Vec<FamilyMember>,
}

impl FamilyFixture {
    pub fn validate(&self) -> Result<(), FamilyError> {
        for m in &self.members {
            if !self.disc.is_arithmetic(m.k) {
                return Err(FamilyError::NotArithmetic(m.k));
            }
            if m.slope != self.slope {
                return Err(FamilyError::SlopeMismatch { k: m.k, got: m.slope, want: self.slope });
            }
        }
        Ok(())
    }
}

/// Exact Newton interpolation of each Fourier coefficient through the
/// member weights, with the divided-difference integrality diagnostic: a
/// genuine family slice has a_n(f_k) = a_n(f_{k'}) mod p^{ord(w_k - w_k')},
/// equivalently all divided differences integral.
pub fn interpolate_coefficients(
    fixture: &FamilyFixture,
    prof: &PrecisionProfile,
) -> Result<Vec<FamilySeries>, FamilyError> {
    fixture.validate()?;
    let s = fixture.members.len();
    if s < 2 {
        return Err(FamilyError::TooFewMembers(2));
    }
    let nmax = fixture.members.iter().map(|m| m.coefficients.len()).min().unwrap_or(0);
    let nodes: Vec<PadicScalar> = fixture
        .members
        .iter()
        .map(|m| fixture.disc.chart(m.k, prof))
        .collect();
    let mut out = Vec::with_capacity(nmax);
    for n in 0..nmax {
        // divided-difference tableau
        let mut col: Vec<PadicScalar> = fixture
            .members
            .iter()
            .map(|m| {
                PadicScalar::from_ratio(
                    m.coefficients[n].numer().clone(),
                    m.coefficients[n].denom().clone(),
                    prof,
                )
            })
            .collect::<Result<_, _>>()?;
        let mut diffs = vec![col[0].clone()];
        for depth in 1..s {
            let mut next = Vec::with_capacity(s - depth);
            for i in 0..s - depth {
                let num = col[i + 1].sub(&col[i], prof);
                let den = nodes[i + depth].sub(&nodes[i], prof);
                let q = num.div(&den, prof)?;
                // integrality = the family congruence at this pair
                if q.valuation(prof).map(|v| v < 0).unwrap_or(false) {
                    return Err(FamilyError::CoherenceViolation {
                        n: n + 1,
                        k1: fixture.members[i].k,
                        k2: fixture.members[i + depth].k,
                        needed: den.valuation(prof).unwrap_or(0),
                        got: num.valuation(prof),
                    });
                }
                next.push(q);
            }
            diffs.push(next[0].clone());
            col = next;
        }
        // Newton form -> coefficients
        let mut poly = FamilySeries::zero(s);
        let mut basis = FamilySeries::constant(PadicScalar::one(prof), 1);
        for (depth, d) in diffs.iter().enumerate() {
            poly = poly.add(&basis.scalar_mul(d, prof), prof);
            if depth + 1 < s {
                let lin = FamilySeries {
                    coeffs: vec![nodes[depth].neg(prof), PadicScalar::one(prof)],
                };
                basis = basis.mul(&lin, prof);
            }
        }
        out.push(poly);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// gluing per-weight L-functions over the weight disc
// ---------------------------------------------------------------------------

/// Two-variable object modulo the ideal of the node set: every series
/// coefficient of the one-variable body becomes a polynomial in the chart
/// variable, interpolating the per-node coefficients.
#[derive(Debug, Clone)]
pub struct TwoVariableL {
    pub disc: WeightDisc,
    pub ideal: IdealFamily,
    /// per branch, per series coefficient: the weight-direction polynomial
    pub branch_coeffs: Vec<Vec<FamilySeries>>,
    pub finite_slope: Option<(u32, i64, i64)>,
    pub certified_abs_precision: i64,
}

fn body_coeff_table(body: &LpBody) -> (Vec<Vec<PadicScalar>>, Option<(u32, i64, i64)>) {
    match body {
        LpBody::Ordinary(e) => {
            (e.branches.iter().map(|b| b.coeffs.clone()).collect(), None)
        }
        LpBody::FiniteSlope { element, h, l, l_prime, .. } => (
            element.branches.iter().map(|b| b.coeffs.clone()).collect(),
            Some((*h, *l, *l_prime)),
        ),
    }
}

/// CRT in the weight direction: Lagrange interpolation of every series
/// coefficient through the nodes, after the pairwise compatibility check
/// the injectivity of the gluing map requires: coefficients at two nodes
/// must agree modulo p^{ord(w_k - w_k')}.
pub fn glue_family_lp(
    disc: &WeightDisc,
    nodes: &[(i64, &LpBody)],
    prof: &PrecisionProfile,
) -> Result<TwoVariableL, FamilyError> {
    if nodes.is_empty() {
        return Err(FamilyError::TooFewMembers(1));
    }
    let tables: Vec<(i64, Vec<Vec<PadicScalar>>, Option<(u32, i64, i64)>)> = nodes
        .iter()
        .map(|(k, body)| {
            let (t, fs) = body_coeff_table(body);
            (*k, t, fs)
        })
        .collect();
    let shape = tables[0].2;
    let nbranch = tables[0].1.len();
    let ncoeff = tables[0].1[0].len();
    for (_, t, fs) in &tables {
        if *fs != shape
            || t.len() != nbranch
            || t.iter().any(|row| row.len() != ncoeff)
        {
            return Err(FamilyError::ShapeMismatch);
        }
    }
    // pairwise compatibility
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let (k1, t1, _) = &tables[i];
            let (k2, t2, _) = &tables[j];
            let gap = disc
                .chart(*k1, prof)
                .sub(&disc.chart(*k2, prof), prof)
                .valuation(prof)
                .unwrap_or(prof.cap_n as i64);
            for b in 0..nbranch {
                for c in 0..ncoeff {
                    let d = t1[b][c].sub(&t2[b][c], prof);
                    let dv = d.valuation(prof);
                    let ok = match dv {
                        None => true,
                        Some(v) => v >= gap.min(d.abs_precision(prof)),
                    };
                    if !ok {
                        return Err(FamilyError::IncompatiblePair {
                            k1: *k1,
                            k2: *k2,
                            branch: b,
                            coeff: c,
                            needed: gap,
                            got: dv,
                        });
                    }
                }
            }
        }
    }
    let points: Vec<i64> = tables.iter().map(|(k, _, _)| *k).collect();
    let ideal = IdealFamily::new(disc, &points, prof)?;
    // Lagrange basis polynomials over the nodes
    let wks: Vec<PadicScalar> = points.iter().map(|k| disc.chart(*k, prof)).collect();
    let mut lagrange = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        let mut num = FamilySeries::constant(PadicScalar::one(prof), 1);
        let mut den = PadicScalar::one(prof);
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let lin = FamilySeries { coeffs: vec![wks[j].neg(prof), PadicScalar::one(prof)] };
            num = num.mul(&lin, prof);
            den = den.mul(&wks[i].sub(&wks[j], prof), prof);
        }
        let dinv = den.inv(prof)?;
        lagrange.push(num.scalar_mul(&dinv, prof));
    }
    let mut branch_coeffs = vec![vec![FamilySeries::zero(points.len()); ncoeff]; nbranch];
    for b in 0..nbranch {
        for c in 0..ncoeff {
            let mut acc = FamilySeries::zero(points.len());
            for (i, (_, t, _)) in tables.iter().enumerate() {
                acc = acc.add(&lagrange[i].scalar_mul(&t[b][c], prof), prof);
            }
            branch_coeffs[b][c] = acc;
        }
    }
    let certified = branch_coeffs
        .iter()
        .flatten()
        .flat_map(|s| s.coeffs.iter())
        .map(|c| c.abs_precision(prof))
        .min()
        .unwrap_or(prof.cap_n as i64);
    Ok(TwoVariableL {
        disc: *disc,
        ideal,
        branch_coeffs,
        finite_slope: shape,
        certified_abs_precision: certified,
    })
}

/// Fiber of the two-variable object at an arithmetic point: evaluates
/// every weight-direction polynomial at the chart value.
pub fn specialize_family(
    two: &TwoVariableL,
    k: i64,
    prof: &PrecisionProfile,
) -> Result<LpBody, FamilyError> {
    if !two.disc.is_arithmetic(k) {
        return Err(FamilyError::OutsideCertified(k));
    }
    let wk = two.disc.chart(k, prof);
    let branches: Vec<Vec<PadicScalar>> = two
        .branch_coeffs
        .iter()
        .map(|row| row.iter().map(|s| s.eval(&wk, prof)).collect())
        .collect();
    Ok(match two.finite_slope {
        None => LpBody::Ordinary(LambdaCycElement {
            branches: branches
                .into_iter()
                .map(|coeffs| crate::iwasawa::IwasawaSeries { coeffs })
                .collect(),
        }),
        Some((h, l, l_prime)) => LpBody::FiniteSlope {
            element: HhCycElement {
                branches: branches
                    .into_iter()
                    .map(|coeffs| HhSeries::new(coeffs, h, prof))
                    .collect(),
            },
            h,
            l,
            l_prime,
            reports: vec![],
        },
    })
}

// ---------------------------------------------------------------------------
// p-adic period ledger
// ---------------------------------------------------------------------------

/// Per-weight comparison scalars between a family basis and the pinned
/// per-form basis, with their unit status.
#[derive(Debug, Clone, Default)]
pub struct PadicPeriodLedger {
    pub entries: Vec<(i64, PadicScalar, PadicScalar)>,
}

impl PadicPeriodLedger {
    pub fn record(&mut self, k: i64, c_plus: PadicScalar, c_minus: PadicScalar) {
        self.entries.push((k, c_plus, c_minus));
    }

    pub fn all_units(&self, prof: &PrecisionProfile) -> bool {
        self.entries.iter().all(|(_, cp, cm)| {
            cp.valuation(prof) == Some(0) && cm.valuation(prof) == Some(0)
        })
    }

    /// Basis-change invariance: if another ledger comes from rescaling the
    /// pinned bases by (u_plus, u_minus), every entry ratio must equal the
    /// rescaling, independent of the weight.
    pub fn ratio_invariant(
        &self,
        other: &PadicPeriodLedger,
        u_plus: &PadicScalar,
        u_minus: &PadicScalar,
        prof: &PrecisionProfile,
    ) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(other.entries.iter()).all(|((k1, ap, am), (k2, bp, bm))| {
                k1 == k2
                    && ap.eq_at_precision(&bp.mul(u_plus, prof), prof)
                    && am.eq_at_precision(&bm.mul(u_minus, prof), prof)
            })
    }
}

// ---------------------------------------------------------------------------
// ordinary projector
// ---------------------------------------------------------------------------

fn rational_matrix_mod(
    m: &[Vec<BigRational>],
    modulus: &BigUint,
    p: u64,
) -> Result<Vec<Vec<BigUint>>, FamilyError> {
    let mut out = vec![vec![BigUint::zero(); m[0].len()]; m.len()];
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let den = x.denom().magnitude();
            if (den % BigUint::from(p)).is_zero() {
                return Err(FamilyError::NonIntegralOperator);
            }
            let dinv = mod_inverse(&(den % modulus), modulus).ok_or(FamilyError::NonIntegralOperator)?;
            let num = x.numer();
            let mag = num.magnitude() % modulus;
            let val = mag * dinv % modulus;
            out[i][j] = if num.is_negative() && !val.is_zero() { modulus - val } else { val };
        }
    }
    Ok(out)
}

fn mat_mul_mod(a: &[Vec<BigUint>], b: &[Vec<BigUint>], modulus: &BigUint) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let mut out = vec![vec![BigUint::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                let t = &a[i][k] * &b[k][j] % modulus;
                out[i][j] = (&out[i][j] + t) % modulus;
            }
        }
    }
    out
}

fn mat_pow_mod(m: &[Vec<BigUint>], mut e: BigUint, modulus: &BigUint) -> Vec<Vec<BigUint>> {
    let n = m.len();
    let mut acc: Vec<Vec<BigUint>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect())
        .collect();
    let mut base = m.to_vec();
    while !e.is_zero() {
        if (&e % 2u32) == BigUint::one() {
            acc = mat_mul_mod(&acc, &base, modulus);
        }
        base = mat_mul_mod(&base, &base, modulus);
        e >>= 1;
    }
    acc
}

/// Result of iterating U_p to its idempotent limit.
#[derive(Debug, Clone)]
pub struct OrdinaryProjector {
    /// idempotent matrix modulo p^cap_n
    pub matrix: Vec<Vec<BigUint>>,
    pub rank: usize,
    pub idempotent_ok: bool,
    pub commutes_ok: bool,
}

/// e = lim U_p^{n!} computed as U^{(p-1) p^cap}: unit eigenvalues power to
/// 1, non-units vanish modulo p^cap.
pub fn ordinary_projector_from_matrix(
    u: &[Vec<BigRational>],
    prof: &PrecisionProfile,
) -> Result<OrdinaryProjector, FamilyError> {
    let modulus = prof.modulus();
    let um = rational_matrix_mod(u, &modulus, prof.p)?;
    let exp = BigUint::from(prof.p - 1) * BigUint::from(prof.p).pow(prof.cap_n);
    let e = mat_pow_mod(&um, exp, &modulus);
    let ee = mat_mul_mod(&e, &e, &modulus);
    let idempotent_ok = ee == e;
    let eu = mat_mul_mod(&e, &um, &modulus);
    let ue = mat_mul_mod(&um, &e, &modulus);
    let commutes_ok = eu == ue;
    // rank of the reduction mod p
    let p = BigUint::from(prof.p);
    let mut red: Vec<Vec<u64>> = e
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let d = (x % &p).to_u64_digits();
                    if d.is_empty() {
                        0
                    } else {
                        d[0]
                    }
                })
                .collect()
        })
        .collect();
    let rank = rank_mod_p(&mut red, prof.p);
    Ok(OrdinaryProjector { matrix: e, rank, idempotent_ok, commutes_ok })
}

fn rank_mod_p(m: &mut [Vec<u64>], p: u64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| m[i][c] % p != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = mod_inverse(&BigUint::from(m[rank][c]), &BigUint::from(p))
            .unwrap()
            .to_u64_digits()[0];
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != rank && m[i][c] % p != 0 {
                let f = m[i][c];
                for cc in 0..cols {
                    m[i][cc] = (m[i][cc] + (p - f % p) * m[rank][cc]) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Hida-style ordinary projector on a symbol space with p dividing the
/// level: iterates the U_p coset operator. Returns the projector with its
/// rank (the ordinary rank).
pub fn hida_ordinary_projector(
    space: &SymbolSpace,
    p: u64,
    prof: &PrecisionProfile,
) -> Result<OrdinaryProjector, FamilyError> {
    assert!(space.level % p == 0, "need p | level; stabilize first otherwise");
    let u = space.hecke_matrix(p);
    ordinary_projector_from_matrix(&u, prof)
}

/// Unit-root count of an integral characteristic polynomial read off its
/// Newton polygon: n minus the first index with a unit coefficient.
pub fn unit_root_count(charpoly: &[BigRational], p: u64) -> usize {
    let n = charpoly.len() - 1;
    let ord = |m: &BigUint| {
        let mut v = 0u32;
        let mut m = m.clone();
        let pb = BigUint::from(p);
        while (&m % &pb).is_zero() {
            m /= &pb;
            v += 1;
        }
        v
    };
    for (i, c) in charpoly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if ord(c.numer().magnitude()) == ord(c.denom().magnitude()) {
            // first index with a unit coefficient
            return n - i;
        }
    }
    0
}

/// Characteristic polynomial by Faddeev-LeVerrier, exact over Q.
pub fn char_poly(m: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: Vec<Vec<BigRational>> = m.to_vec();
    let mut c = BigRational::one();
    for k in 1..=n {
        if k > 1 {
            // M_k = M (M_{k-1} + c_{k-1} I)
            let mut shifted = mk.clone();
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] += &c;
            }
            mk = crate::modsym::mat_mul(m, &shifted);
        }
        let tr: BigRational = (0..n).map(|i| mk[i][i].clone()).sum();
        c = -tr / BigRational::from_integer(BigInt::from(k as i64));
        coeffs[n - k] = c.clone();
    }
    coeffs
}
