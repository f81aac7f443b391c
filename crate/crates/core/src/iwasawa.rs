//! The cyclotomic Iwasawa algebra: truncated power series over Z_p, the
//! (p-1)-branch semi-local product, specialization at characters of the
//! tower, Weierstrass preparation and characteristic ideals of presented
//! torsion modules.
//!
//! The Iwasawa-Serre identification sends the chosen topological generator
//! gamma of the principal-unit line to 1+X; gamma itself corresponds to the
//! unit 1+p. Branch i of the semi-local product carries the omega^i
//! eigenspace of the tame quotient.

use crate::padic::{
    cyclo_degree, gamma_coordinate, teichmuller, CycloScalar, PadicCharacter, PadicError,
    PadicScalar, PrecisionProfile,
};
use num_bigint::BigUint;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IwasawaError {
    #[error("series is zero at working precision; increase precision")]
    ZeroSeries,
    #[error("series truncation degree {need} exceeds the profile cap {cap}")]
    DegreeOverflow { need: usize, cap: usize },
    #[error("no unit coefficient within the stored range")]
    NoUnitCoefficient,
    #[error("presentation matrix is not square")]
    NotSquare,
    #[error("series tail cannot stabilize the evaluation: certified precision {0} <= 0")]
    TailUnstable(i64),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Element of Z_p[[X]] truncated at degree `series_cap`.
#[derive(Debug, Clone)]
pub struct IwasawaSeries {
    pub coeffs: Vec<PadicScalar>,
}

impl IwasawaSeries {
    pub fn zero(prof: &PrecisionProfile) -> Self {
        IwasawaSeries { coeffs: vec![PadicScalar::zero(); prof.series_cap + 1] }
    }

    pub fn one(prof: &PrecisionProfile) -> Self {
        let mut s = Self::zero(prof);
        s.coeffs[0] = PadicScalar::one(prof);
        s
    }

    pub fn x(prof: &PrecisionProfile) -> Self {
        let mut s = Self::zero(prof);
        s.coeffs[1] = PadicScalar::one(prof);
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<PadicScalar>, prof: &PrecisionProfile) -> Self {
        coeffs.resize(prof.series_cap + 1, PadicScalar::zero());
        IwasawaSeries { coeffs }
    }

    pub fn constant(c: PadicScalar, prof: &PrecisionProfile) -> Self {
        let mut s = Self::zero(prof);
        s.coeffs[0] = c;
        s
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_at_precision())
    }

    /// Degree of the highest stored nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero_at_precision())
    }

    pub fn add(&self, other: &Self, prof: &PrecisionProfile) -> Self {
        IwasawaSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a.add(b, prof))
                .collect(),
        }
    }

    pub fn neg(&self, prof: &PrecisionProfile) -> Self {
        IwasawaSeries { coeffs: self.coeffs.iter().map(|c| c.neg(prof)).collect() }
    }

    pub fn sub(&self, other: &Self, prof: &PrecisionProfile) -> Self {
        self.add(&other.neg(prof), prof)
    }

    pub fn scalar_mul(&self, s: &PadicScalar, prof: &PrecisionProfile) -> Self {
        IwasawaSeries { coeffs: self.coeffs.iter().map(|c| c.mul(s, prof)).collect() }
    }

    pub fn mul_p_power(&self, k: i64) -> Self {
        IwasawaSeries { coeffs: self.coeffs.iter().map(|c| c.mul_p_power(k)).collect() }
    }

    /// Product truncated at `deg` (inclusive).
    pub fn mul_trunc(&self, other: &Self, deg: usize, prof: &PrecisionProfile) -> Vec<PadicScalar> {
        let mut out = vec![PadicScalar::zero(); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > deg || a.is_zero_at_precision() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > deg {
                    break;
                }
                if b.is_zero_at_precision() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b, prof), prof);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self, prof: &PrecisionProfile) -> Self {
        IwasawaSeries { coeffs: self.mul_trunc(other, prof.series_cap, prof) }
    }

    /// Inverse of a series with unit constant term, to the truncation degree.
    pub fn invert_unit(&self, prof: &PrecisionProfile) -> Result<Self, IwasawaError> {
        let c0 = &self.coeffs[0];
        if c0.valuation(prof) != Some(0) {
            return Err(PadicError::NonUnit.into());
        }
        let c0inv = c0.inv(prof)?;
        let n = prof.series_cap;
        let mut inv = vec![PadicScalar::zero(); n + 1];
        inv[0] = c0inv.clone();
        for k in 1..=n {
            let mut acc = PadicScalar::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero_at_precision() {
                    continue;
                }
                acc = acc.add(&self.coeffs[j].mul(&inv[k - j], prof), prof);
            }
            inv[k] = acc.neg(prof).mul(&c0inv, prof);
        }
        Ok(IwasawaSeries { coeffs: inv })
    }

    pub fn eq_at_precision(&self, other: &Self, prof: &PrecisionProfile) -> bool {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .all(|(a, b)| a.eq_at_precision(b, prof))
    }

    /// Minimum valuation over stored coefficients; `None` when all are zero.
    pub fn min_valuation(&self, prof: &PrecisionProfile) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.valuation(prof)).min()
    }

    /// Evaluates the series at a cyclotomic point by Horner's rule.
    pub fn eval_cyclo(&self, x: &CycloScalar, prof: &PrecisionProfile) -> CycloScalar {
        let mut acc = CycloScalar::zero(prof.p, x.level);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x, prof);
            acc = acc.add(&CycloScalar::from_scalar(c.clone()), prof);
        }
        acc
    }
}

/// Semi-local element: one Z_p[[X]]-component per Teichmueller power,
/// branch i carrying the omega^i eigenspace, i = 0..p-2.
#[derive(Debug, Clone)]
pub struct LambdaCycElement {
    pub branches: Vec<IwasawaSeries>,
}

impl LambdaCycElement {
    pub fn zero(prof: &PrecisionProfile) -> Self {
        LambdaCycElement {
            branches: (0..prof.p - 1).map(|_| IwasawaSeries::zero(prof)).collect(),
        }
    }

    pub fn one(prof: &PrecisionProfile) -> Self {
        LambdaCycElement {
            branches: (0..prof.p - 1).map(|_| IwasawaSeries::one(prof)).collect(),
        }
    }

    pub fn add(&self, other: &Self, prof: &PrecisionProfile) -> Self {
        LambdaCycElement {
            branches: self
                .branches
                .iter()
                .zip(other.branches.iter())
                .map(|(a, b)| a.add(b, prof))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self, prof: &PrecisionProfile) -> Self {
        LambdaCycElement {
            branches: self
                .branches
                .iter()
                .zip(other.branches.iter())
                .map(|(a, b)| a.mul(b, prof))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self, prof: &PrecisionProfile) -> Self {
        LambdaCycElement {
            branches: self
                .branches
                .iter()
                .zip(other.branches.iter())
                .map(|(a, b)| a.sub(b, prof))
                .collect(),
        }
    }

    pub fn eq_at_precision(&self, other: &Self, prof: &PrecisionProfile) -> bool {
        self.branches
            .iter()
            .zip(other.branches.iter())
            .all(|(a, b)| a.eq_at_precision(b, prof))
    }

    pub fn scalar_mul(&self, s: &PadicScalar, prof: &PrecisionProfile) -> Self {
        LambdaCycElement {
            branches: self.branches.iter().map(|b| b.scalar_mul(s, prof)).collect(),
        }
    }

    /// The image of the group element attached to a unit u of Z_p: on branch
    /// i it is omega^i(u) (1+X)^{z(u)} with z(u) the coordinate of <u> on the
    /// principal-unit line.
    pub fn group_like(u: &PadicScalar, prof: &PrecisionProfile) -> Result<Self, IwasawaError> {
        let z = gamma_coordinate(u, prof)?;
        let a0 = (&u.res % prof.p_big()).to_u64_digits();
        let a0 = if a0.is_empty() { 0 } else { a0[0] };
        let om = teichmuller(a0, prof)?;
        let one_plus_x_z = binomial_power_series(&z, prof)?;
        let mut branches = Vec::with_capacity((prof.p - 1) as usize);
        for i in 0..prof.p - 1 {
            let chi = om.pow_u64(i, prof);
            branches.push(one_plus_x_z.scalar_mul(&chi, prof));
        }
        Ok(LambdaCycElement { branches })
    }
}

/// (1+X)^z for a p-adic integer exponent z, via the binomial series. Guard
/// digits cover the denominators of the binomial coefficients.
pub fn binomial_power_series(z: &PadicScalar, prof: &PrecisionProfile) -> Result<IwasawaSeries, IwasawaError> {
    let n = prof.series_cap;
    // ord_p(t!) <= t/(p-1); a few extra digits make every division exact
    let guard = (n as u32) / (prof.p as u32 - 1) + 2;
    let boosted = PrecisionProfile { p: prof.p, cap_n: prof.cap_n + guard, series_cap: n };
    let zb = PadicScalar { scale: z.scale, res: z.res.clone() };
    let mut coeffs = vec![PadicScalar::zero(); n + 1];
    coeffs[0] = PadicScalar::one(prof);
    let mut term = PadicScalar::one(&boosted);
    for t in 1..=n {
        // term = z (z-1) ... (z-t+1) / t!
        let factor = zb.sub(&PadicScalar::from_u64(t as u64 - 1, &boosted), &boosted);
        term = term.mul(&factor, &boosted);
        term = term.div(&PadicScalar::from_u64(t as u64, &boosted), &boosted)?;
        coeffs[t] = PadicScalar { scale: term.scale, res: term.res.clone() % prof.modulus() };
    }
    Ok(IwasawaSeries::from_coeffs(coeffs, prof))
}

fn binomial_biguint(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// omega_n^{[j]} = (1+X)^{p^n} - (1+p)^{j p^n}.
pub fn omega_poly(n: u32, j: i64, prof: &PrecisionProfile) -> Result<IwasawaSeries, IwasawaError> {
    let pn = prof.p.checked_pow(n).expect("p^n overflow");
    if pn as usize > prof.series_cap {
        return Err(IwasawaError::DegreeOverflow { need: pn as usize, cap: prof.series_cap });
    }
    let m = prof.modulus();
    let mut coeffs = vec![PadicScalar::zero(); prof.series_cap + 1];
    for t in 0..=pn {
        coeffs[t as usize] = PadicScalar { scale: 0, res: binomial_biguint(pn, t) % &m };
    }
    let shift = PadicScalar::from_u64(prof.p + 1, prof)
        .pow_i64(j, prof)?
        .pow_u64(pn, prof);
    coeffs[0] = coeffs[0].sub(&shift, prof);
    Ok(IwasawaSeries { coeffs })
}

/// Specializes a one-branch series at chi^j phi: evaluation at
/// X = (1+p)^j zeta - 1 with zeta = phi(gamma). Returns the value and the
/// certified absolute precision, accounting for the unknown tail above the
/// truncation degree through `tail_floor`, a lower bound for the valuation
/// of the dropped coefficients (0 for integral series).
pub fn specialize_with_floor(
    f: &IwasawaSeries,
    chi: &PadicCharacter,
    tail_floor: i64,
    prof: &PrecisionProfile,
) -> Result<(CycloScalar, i64), IwasawaError> {
    let wl = chi.wild_level;
    if wl > prof.max_cyclo_level() {
        return Err(PadicError::LevelTooLarge { level: wl, max: prof.max_cyclo_level() }.into());
    }
    let zeta = chi.value_at_gamma(prof);
    let uj = PadicScalar::from_u64(prof.p + 1, prof).pow_i64(chi.cyc_power, prof)?;
    let point = zeta
        .scalar_mul(&uj, prof)
        .sub(&CycloScalar::one(prof), prof);
    let value = f.eval_cyclo(&point, prof);
    // ord_p of the evaluation point: 1 for a tame point (j != 0), else
    // 1/phi(p^wl) when a wild root of unity is present; exactly zero point
    // when the whole character is trivial on gamma.
    let certified = if point.is_zero_at_precision() {
        i64::MAX
    } else if wl == 0 {
        // ord(x0) >= 1
        tail_floor + (prof.series_cap as i64 + 1)
    } else {
        let e_den = cyclo_degree(prof.p, wl) as i64;
        tail_floor + (prof.series_cap as i64 + 1) / e_den
    };
    if certified <= 0 {
        return Err(IwasawaError::TailUnstable(certified));
    }
    Ok((value, certified))
}

pub fn specialize(
    f: &IwasawaSeries,
    chi: &PadicCharacter,
    prof: &PrecisionProfile,
) -> Result<CycloScalar, IwasawaError> {
    specialize_with_floor(f, chi, 0, prof).map(|(v, _)| v)
}

/// Specialization of a semi-local element at chi^j phi: reads the branch
/// indexed by (j + tame exponent) mod (p-1) and evaluates it.
pub fn specialize_semilocal(
    f: &LambdaCycElement,
    chi: &PadicCharacter,
    prof: &PrecisionProfile,
) -> Result<CycloScalar, IwasawaError> {
    let b = (chi.cyc_power + chi.tame as i64).rem_euclid(prof.p as i64 - 1) as usize;
    specialize(&f.branches[b], chi, prof)
}

/// Output of Weierstrass preparation: f = p^mu * distinguished * unit.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub mu: i64,
    pub lambda: usize,
    /// monic of degree lambda, non-leading coefficients divisible by p
    pub distinguished: IwasawaSeries,
    pub unit_part: IwasawaSeries,
}

/// Weierstrass division: for `g` with unit coefficient first appearing at
/// index lambda, writes `t = q g + r` with deg r < lambda. The iteration
/// gains one p-digit per pass since the low part of g is divisible by p.
fn weierstrass_divide(
    t: &IwasawaSeries,
    g: &IwasawaSeries,
    lambda: usize,
    prof: &PrecisionProfile,
) -> Result<(IwasawaSeries, IwasawaSeries), IwasawaError> {
    let d = prof.series_cap;
    let tau = |h: &[PadicScalar]| -> IwasawaSeries {
        let mut c = vec![PadicScalar::zero(); d + 1];
        for i in lambda..h.len().min(d + 1 + lambda) {
            c[i - lambda] = h[i].clone();
        }
        IwasawaSeries { coeffs: c }
    };
    let low = IwasawaSeries::from_coeffs(g.coeffs[..lambda].to_vec(), prof);
    let high = tau(&g.coeffs);
    let hinv = high.invert_unit(prof)?;
    let target = tau(&t.coeffs);
    let mut q = IwasawaSeries::zero(prof);
    for _ in 0..=prof.cap_n {
        // q <- Hinv (tau(t) - tau(q L)); products feeding tau carry lambda
        // extra degrees so the shifted coefficients are complete
        let ql = q.mul_trunc(&low, d + lambda, prof);
        let correction = tau(&ql);
        let q_next = hinv.mul(&target.sub(&correction, prof), prof);
        if q_next.eq_at_precision(&q, prof) {
            q = q_next;
            break;
        }
        q = q_next;
    }
    let qg = q.mul_trunc(g, d + lambda, prof);
    let mut r_coeffs = vec![PadicScalar::zero(); d + 1];
    for i in 0..lambda {
        r_coeffs[i] = t.coeffs[i].sub(&qg[i], prof);
    }
    Ok((q, IwasawaSeries { coeffs: r_coeffs }))
}

/// Classical preparation at finite precision. The budgeted loss is at most
/// lambda digits, spent inside the division iteration.
pub fn weierstrass_prepare(
    f: &IwasawaSeries,
    prof: &PrecisionProfile,
) -> Result<WeierstrassData, IwasawaError> {
    let mu = f.min_valuation(prof).ok_or(IwasawaError::ZeroSeries)?;
    let g = f.mul_p_power(-mu);
    let lambda = g
        .coeffs
        .iter()
        .position(|c| c.valuation(prof) == Some(0))
        .ok_or(IwasawaError::NoUnitCoefficient)?;
    if lambda == 0 {
        // already a unit: distinguished polynomial is 1
        return Ok(WeierstrassData {
            mu,
            lambda: 0,
            distinguished: IwasawaSeries::one(prof),
            unit_part: g,
        });
    }
    let mut xl = IwasawaSeries::zero(prof);
    xl.coeffs[lambda] = PadicScalar::one(prof);
    let (q, r) = weierstrass_divide(&xl, &g, lambda, prof)?;
    // X^lambda = q g + r, so the distinguished factor is X^lambda - r and
    // the unit is q^{-1}
    let mut dist = r.neg(prof);
    dist.coeffs[lambda] = PadicScalar::one(prof);
    let unit_part = q.invert_unit(prof)?;
    Ok(WeierstrassData { mu, lambda, distinguished: dist, unit_part })
}

/// mu and lambda per branch; `None` marks a branch that vanishes at
/// precision.
pub fn mu_lambda(
    f: &LambdaCycElement,
    prof: &PrecisionProfile,
) -> Vec<Option<(i64, usize)>> {
    f.branches
        .iter()
        .map(|b| weierstrass_prepare(b, prof).ok().map(|w| (w.mu, w.lambda)))
        .collect()
}

/// Principal characteristic ideal of a presented module, with per-branch
/// torsion bookkeeping.
#[derive(Debug, Clone)]
pub struct CharacteristicIdeal {
    pub generator: LambdaCycElement,
    /// true when the branch determinant is nonzero at precision (module
    /// torsion on that branch)
    pub torsion_flags: Vec<bool>,
}

fn det_series(m: &[Vec<IwasawaSeries>], prof: &PrecisionProfile) -> IwasawaSeries {
    let n = m.len();
    if n == 0 {
        return IwasawaSeries::one(prof);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    // cofactor expansion along the first row; presentations at desk scale
    // stay small
    let mut acc = IwasawaSeries::zero(prof);
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero_at_precision() {
            continue;
        }
        let minor: Vec<Vec<IwasawaSeries>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let sub = det_series(&minor, prof);
        let term = entry.mul(&sub, prof);
        if j % 2 == 0 {
            acc = acc.add(&term, prof);
        } else {
            acc = acc.sub(&term, prof);
        }
    }
    acc
}

/// Characteristic ideal of the cokernel of a square presentation matrix:
/// the per-branch determinant. A vanishing determinant flags the branch as
/// non-torsion and zeroes the generator there.
pub fn char_ideal_from_presentation(
    m: &[Vec<LambdaCycElement>],
    prof: &PrecisionProfile,
) -> Result<CharacteristicIdeal, IwasawaError> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(IwasawaError::NotSquare);
        }
    }
    let nb = (prof.p - 1) as usize;
    let mut branches = Vec::with_capacity(nb);
    let mut torsion = Vec::with_capacity(nb);
    for b in 0..nb {
        let mb: Vec<Vec<IwasawaSeries>> = m
            .iter()
            .map(|row| row.iter().map(|e| e.branches[b].clone()).collect())
            .collect();
        let det = det_series(&mb, prof);
        let tors = !det.is_zero_at_precision();
        branches.push(if tors { det } else { IwasawaSeries::zero(prof) });
        torsion.push(tors);
    }
    Ok(CharacteristicIdeal { generator: LambdaCycElement { branches }, torsion_flags: torsion })
}

/// Exact quotient by a monic polynomial divisor; error if the division
/// leaves a remainder at precision.
pub fn div_exact_monic(
    f: &IwasawaSeries,
    divisor: &IwasawaSeries,
    prof: &PrecisionProfile,
) -> Result<IwasawaSeries, IwasawaError> {
    let dd = divisor.degree().ok_or(IwasawaError::ZeroSeries)?;
    assert!(
        divisor.coeffs[dd].valuation(prof) == Some(0),
        "divisor must have unit leading coefficient"
    );
    let lead_inv = divisor.coeffs[dd].inv(prof)?;
    let mut rem = f.coeffs.clone();
    let mut quot = vec![PadicScalar::zero(); prof.series_cap + 1];
    let fd = match f.degree() {
        Some(d) => d,
        None => return Ok(IwasawaSeries::zero(prof)),
    };
    for i in (dd..=fd).rev() {
        if rem[i].is_zero_at_precision() {
            continue;
        }
        let c = rem[i].mul(&lead_inv, prof);
        quot[i - dd] = c.clone();
        for k in 0..=dd {
            let t = divisor.coeffs[k].mul(&c, prof);
            rem[i - dd + k] = rem[i - dd + k].sub(&t, prof);
        }
    }
    let remainder = IwasawaSeries { coeffs: rem };
    if !remainder.is_zero_at_precision() {
        return Err(IwasawaError::ZeroSeries);
    }
    Ok(IwasawaSeries { coeffs: quot })
}

/// Remainder of f modulo a monic polynomial (no exactness requirement).
pub fn rem_monic(f: &IwasawaSeries, divisor: &IwasawaSeries, prof: &PrecisionProfile) -> IwasawaSeries {
    let dd = divisor.degree().expect("divisor must be nonzero");
    let lead_inv = divisor.coeffs[dd].inv(prof).expect("monic divisor");
    let mut rem = f.coeffs.clone();
    let fd = match f.degree() {
        Some(d) => d,
        None => return IwasawaSeries::zero(prof),
    };
    if fd < dd {
        return f.clone();
    }
    for i in (dd..=fd).rev() {
        if rem[i].is_zero_at_precision() {
            continue;
        }
        let c = rem[i].mul(&lead_inv, prof);
        for k in 0..=dd {
            let t = divisor.coeffs[k].mul(&c, prof);
            rem[i - dd + k] = rem[i - dd + k].sub(&t, prof);
        }
        rem[i] = PadicScalar::zero();
    }
    for c in rem.iter_mut().skip(dd) {
        *c = PadicScalar::zero();
    }
    IwasawaSeries { coeffs: rem }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;

    fn prof() -> PrecisionProfile {
        PrecisionProfile::new(3, 20, 32).unwrap()
    }

    #[test]
    fn specialize_x_at_trivial_and_cyclotomic() {
        let prof = prof();
        let f = IwasawaSeries::x(&prof);
        let v = specialize(&f, &PadicCharacter::trivial(), &prof).unwrap();
        assert!(v.is_zero_at_precision());
        // X at chi^1: (1+p) - 1 = p = 3
        let v = specialize(&f, &PadicCharacter::cyclotomic_power(1), &prof).unwrap();
        let expect = CycloScalar::from_scalar(PadicScalar::from_u64(3, &prof));
        assert!(v.eq_at_precision(&expect, &prof));
    }

    #[test]
    fn specialize_geometric_sum_matches_closed_form() {
        let prof = PrecisionProfile::new(5, 16, 40).unwrap();
        let mut f = IwasawaSeries::zero(&prof);
        for c in f.coeffs.iter_mut() {
            *c = PadicScalar::one(&prof);
        }
        // sum X^i at X = 5 equals 1/(1-5) up to the truncation tail
        let (v, certified) =
            specialize_with_floor(&f, &PadicCharacter::cyclotomic_power(1), 0, &prof).unwrap();
        use num_bigint::BigInt;
        let closed = PadicScalar::from_ratio(BigInt::from(-1), BigInt::from(4), &prof).unwrap();
        let closed = CycloScalar::from_scalar(closed).truncate_abs_precision(certified, &prof);
        let v = v.truncate_abs_precision(certified, &prof);
        assert!(certified >= 16);
        assert!(v.eq_at_precision(&closed, &prof));
    }

    #[test]
    fn omega_polys_match_binomial_expansion() {
        let prof = prof();
        // n=1, j=0, p=3: X^3 + 3X^2 + 3X
        let w = omega_poly(1, 0, &prof).unwrap();
        let expect = [0i64, 3, 3, 1];
        for (i, e) in expect.iter().enumerate() {
            assert!(w.coeffs[i].eq_at_precision(&PadicScalar::from_i64(*e, &prof), &prof));
        }
        // n=1, j=1, p=3: X^3 + 3X^2 + 3X - 63
        let w = omega_poly(1, 1, &prof).unwrap();
        let expect = [-63i64, 3, 3, 1];
        for (i, e) in expect.iter().enumerate() {
            assert!(w.coeffs[i].eq_at_precision(&PadicScalar::from_i64(*e, &prof), &prof));
        }
    }

    #[test]
    fn omega_tower_divisibility() {
        let prof = PrecisionProfile::new(3, 18, 32).unwrap();
        let w1 = omega_poly(1, 0, &prof).unwrap();
        let w2 = omega_poly(2, 0, &prof).unwrap();
        let q = div_exact_monic(&w2, &w1, &prof).unwrap();
        assert_eq!(q.degree(), Some(6));
        let back = q.mul(&w1, &prof);
        assert!(back.eq_at_precision(&w2, &prof));
    }

    #[test]
    fn omega_coprimality_via_constant_difference() {
        let prof = prof();
        // omega_n^[j] - omega_n^[j'] is the constant a_{j'} - a_j, whose
        // valuation is finite; this is the operational coprimality witness
        let wa = omega_poly(1, 0, &prof).unwrap();
        let wb = omega_poly(1, 1, &prof).unwrap();
        let diff = wa.sub(&wb, &prof);
        assert_eq!(diff.degree(), Some(0));
        let v = diff.coeffs[0].valuation(&prof).unwrap();
        // (1+p)^{p} - 1 has valuation n+1 = 2
        assert_eq!(v, 2);
    }

    #[test]
    fn weierstrass_trivial_cases() {
        let prof = prof();
        let f = IwasawaSeries::constant(PadicScalar::from_u64(3, &prof), &prof);
        let w = weierstrass_prepare(&f, &prof).unwrap();
        assert_eq!((w.mu, w.lambda), (1, 0));
        assert!(w.distinguished.eq_at_precision(&IwasawaSeries::one(&prof), &prof));

        // X + p: already distinguished
        let mut f = IwasawaSeries::x(&prof);
        f.coeffs[0] = PadicScalar::from_u64(3, &prof);
        let w = weierstrass_prepare(&f, &prof).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 1));
        assert!(w.distinguished.eq_at_precision(&f, &prof));
        assert!(w.unit_part.eq_at_precision(&IwasawaSeries::one(&prof), &prof));
    }

    #[test]
    fn weierstrass_reconstructs_and_matches_newton_polygon() {
        let prof = PrecisionProfile::new(3, 16, 24).unwrap();
        // f = pX + p^2 + X^2
        let mut f = IwasawaSeries::zero(&prof);
        f.coeffs[0] = PadicScalar::from_u64(9, &prof);
        f.coeffs[1] = PadicScalar::from_u64(3, &prof);
        f.coeffs[2] = PadicScalar::one(&prof);
        let w = weierstrass_prepare(&f, &prof).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 2));
        let back = w.distinguished.mul(&w.unit_part, &prof).mul_p_power(w.mu);
        assert!(back.eq_at_precision(&f, &prof));
        // distinguished coefficients below the top are divisible by p
        for c in w.distinguished.coeffs.iter().take(2) {
            assert!(c.valuation(&prof).map(|v| v >= 1).unwrap_or(true));
        }
        let (mu_np, lambda_np) = oracles::newton_polygon_mu_lambda(&f, &prof).unwrap();
        assert_eq!((w.mu, w.lambda), (mu_np, lambda_np));
    }

    #[test]
    fn char_ideal_of_diagonal_presentations() {
        let prof = prof();
        let p_elt = {
            let mut e = LambdaCycElement::zero(&prof);
            for b in e.branches.iter_mut() {
                *b = IwasawaSeries::constant(PadicScalar::from_u64(3, &prof), &prof);
            }
            e
        };
        let ci = char_ideal_from_presentation(&[vec![p_elt]], &prof).unwrap();
        for (b, flag) in ci.torsion_flags.iter().enumerate() {
            assert!(*flag);
            let w = weierstrass_prepare(&ci.generator.branches[b], &prof).unwrap();
            assert_eq!((w.mu, w.lambda), (1, 0));
        }

        // diag(X, X+p) -> X^2 + pX with lambda = 2
        let x = {
            let mut e = LambdaCycElement::zero(&prof);
            for b in e.branches.iter_mut() {
                *b = IwasawaSeries::x(&prof);
            }
            e
        };
        let xp = {
            let mut e = LambdaCycElement::zero(&prof);
            for b in e.branches.iter_mut() {
                let mut s = IwasawaSeries::x(&prof);
                s.coeffs[0] = PadicScalar::from_u64(3, &prof);
                *b = s;
            }
            e
        };
        let zero = LambdaCycElement::zero(&prof);
        let m = vec![vec![x.clone(), zero.clone()], vec![zero.clone(), xp.clone()]];
        let ci = char_ideal_from_presentation(&m, &prof).unwrap();
        let expect = x.mul(&xp, &prof);
        assert!(ci.generator.eq_at_precision(&expect, &prof));
        let w = weierstrass_prepare(&ci.generator.branches[0], &prof).unwrap();
        assert_eq!((w.mu, w.lambda), (0, 2));
    }

    #[test]
    fn char_ideal_multiplicative_on_direct_sums() {
        let prof = prof();
        let mk = |c0: i64, c1: i64| {
            let mut e = LambdaCycElement::zero(&prof);
            for b in e.branches.iter_mut() {
                let mut s = IwasawaSeries::x(&prof);
                s.coeffs[0] = PadicScalar::from_i64(c0, &prof);
                s.coeffs[2] = PadicScalar::from_i64(c1, &prof);
                *b = s;
            }
            e
        };
        let a = mk(3, 1);
        let b = mk(9, 2);
        let zero = LambdaCycElement::zero(&prof);
        let ci_a = char_ideal_from_presentation(&[vec![a.clone()]], &prof).unwrap();
        let ci_b = char_ideal_from_presentation(&[vec![b.clone()]], &prof).unwrap();
        let ci_ab = char_ideal_from_presentation(
            &[vec![a.clone(), zero.clone()], vec![zero.clone(), b.clone()]],
            &prof,
        )
        .unwrap();
        let prod = ci_a.generator.mul(&ci_b.generator, &prof);
        assert!(ci_ab.generator.eq_at_precision(&prod, &prof));
    }

    #[test]
    fn smith_form_planted_product() {
        let prof = PrecisionProfile::new(3, 14, 24).unwrap();
        // U diag(d1, d2, d3) V with unimodular U, V over Z[X]: det equals
        // d1 d2 d3 up to the unit det(U)det(V) = 1
        let s = |v: &[i64]| {
            IwasawaSeries::from_coeffs(
                v.iter().map(|c| PadicScalar::from_i64(*c, &prof)).collect(),
                &prof,
            )
        };
        let d = [s(&[3]), s(&[0, 1]), s(&[9, 3, 1])];
        // U = [[1,1,0],[0,1,1],[0,0,1]], V = [[1,0,1],[0,1,0],[0,0,1]]
        let u = [[1i64, 1, 0], [0, 1, 1], [0, 0, 1]];
        let v = [[1i64, 0, 1], [0, 1, 0], [0, 0, 1]];
        let mut m = vec![vec![IwasawaSeries::zero(&prof); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = IwasawaSeries::zero(&prof);
                for k in 0..3 {
                    if u[i][k] == 0 || v[k][j] == 0 {
                        continue;
                    }
                    let term = d[k]
                        .scalar_mul(&PadicScalar::from_i64(u[i][k] * v[k][j], &prof), &prof);
                    acc = acc.add(&term, &prof);
                }
                m[i][j] = acc;
            }
        }
        let det = det_series(&m, &prof);
        let expect = d[0].mul(&d[1], &prof).mul(&d[2], &prof);
        // compare normalized invariants, the honest unit-insensitive data
        let wd = weierstrass_prepare(&det, &prof).unwrap();
        let we = weierstrass_prepare(&expect, &prof).unwrap();
        assert_eq!((wd.mu, wd.lambda), (we.mu, we.lambda));
        assert!(wd.distinguished.eq_at_precision(&we.distinguished, &prof));
    }

    #[test]
    fn group_like_round_trip_and_augmentation() {
        let prof = PrecisionProfile::new(3, 12, 16).unwrap();
        let u = PadicScalar::from_u64(7, &prof);
        let g = LambdaCycElement::group_like(&u, &prof).unwrap();
        // augmentation (X -> 0, trivial character) gives omega^i(u) per branch
        for (i, b) in g.branches.iter().enumerate() {
            let v = specialize(b, &PadicCharacter::trivial(), &prof).unwrap();
            let om = teichmuller(7, &prof).unwrap().pow_u64(i as u64, &prof);
            assert!(v.eq_at_precision(&CycloScalar::from_scalar(om), &prof));
        }
        // group-likes are multiplicative
        let u2 = PadicScalar::from_u64(5, &prof);
        let g2 = LambdaCycElement::group_like(&u2, &prof).unwrap();
        let g12 = LambdaCycElement::group_like(&u.mul(&u2, &prof), &prof).unwrap();
        let prod = g.mul(&g2, &prof);
        // compare at the precision the binomial series guarantees
        for (a, b) in prod.branches.iter().zip(g12.branches.iter()) {
            for (x, y) in a.coeffs.iter().zip(b.coeffs.iter()) {
                assert!(x.eq_at_precision(y, &prof));
            }
        }
    }

    #[test]
    fn mu_lambda_per_branch() {
        let prof = prof();
        let mut e = LambdaCycElement::one(&prof);
        // branch 0 = p X, branch 1 stays 1
        let mut s = IwasawaSeries::x(&prof);
        s = s.scalar_mul(&PadicScalar::from_u64(3, &prof), &prof);
        e.branches[0] = s;
        let ml = mu_lambda(&e, &prof);
        assert_eq!(ml[0], Some((1, 1)));
        assert_eq!(ml[1], Some((0, 0)));
    }
}
