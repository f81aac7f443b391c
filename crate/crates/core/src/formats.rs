//! File formats: exact JSON records for scalars, semi-local series
//! elements, order-h elements, congruence grids, L-functions, q-expansion
//! and family fixtures, and interpolation reports. Every record round-trips
//! bit-exactly: residues are decimal strings, rationals are "num/den"
//! strings, nothing passes through floating point.

use crate::distributions::{CongruenceGrid, HhCycElement, HhSeries};
use crate::iwasawa::{IwasawaSeries, LambdaCycElement};
use crate::padic::{CycloScalar, PadicScalar, PrecisionProfile};
use crate::plfn::{InterpolationReport, LpBody, Verdict};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("malformed digit string: {0}")]
    BadDigits(String),
    #[error("malformed rational: {0}")]
    BadRational(String),
    #[error("profile mismatch: record says p={0}, profile has p={1}")]
    ProfileMismatch(u64, u64),
    #[error("unknown kind tag: {0}")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScalarRecord {
    pub scale: i64,
    pub digits: String,
}

impl ScalarRecord {
    pub fn of(s: &PadicScalar) -> Self {
        ScalarRecord { scale: s.scale, digits: s.res.to_string() }
    }

    pub fn to_scalar(&self) -> Result<PadicScalar, FormatError> {
        let res = BigUint::from_str(&self.digits)
            .map_err(|_| FormatError::BadDigits(self.digits.clone()))?;
        Ok(PadicScalar { scale: self.scale, res })
    }
}

pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_from_string(s: &str) -> Result<BigRational, FormatError> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| FormatError::BadRational(s.to_string()))?;
    let d = BigInt::from_str(d.trim()).map_err(|_| FormatError::BadRational(s.to_string()))?;
    if d.is_zero() {
        return Err(FormatError::BadRational(s.to_string()));
    }
    Ok(BigRational::new(n, d))
}

/// Conventions pinned by this build, emitted in every provenance block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub p: u64,
    pub cap_n: u32,
    pub series_cap: usize,
    pub chart: String,
    pub frobenius: String,
    pub sgn: String,
    pub basis: String,
}

impl Provenance {
    pub fn new(prof: &PrecisionProfile) -> Self {
        Provenance {
            p: prof.p,
            cap_n: prof.cap_n,
            series_cap: prof.series_cap,
            chart: "w_k = (1+p)^(k-k0) - 1; gamma -> 1+X with chi_cyc(gamma) = 1+p".into(),
            frobenius: "geometric: [s_q] is the group element of the unit q^{-1}".into(),
            sgn: "sgn(j, phi) = (-1)^(j-1) phi(-1)".into(),
            basis: "eigen-symbols normalized to first nonzero quotient coordinate = 1; \
                    functionals paired to 1 against them"
                .into(),
        }
    }
}

// ---------------------------------------------------------------------------
// semi-local and order-h elements
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaRecord {
    pub p: u64,
    pub cap_n: u32,
    pub series_cap: usize,
    pub branches: Vec<Vec<ScalarRecord>>,
}

impl LambdaRecord {
    pub fn of(e: &LambdaCycElement, prof: &PrecisionProfile) -> Self {
        LambdaRecord {
            p: prof.p,
            cap_n: prof.cap_n,
            series_cap: prof.series_cap,
            branches: e
                .branches
                .iter()
                .map(|b| b.coeffs.iter().map(ScalarRecord::of).collect())
                .collect(),
        }
    }

    pub fn to_element(&self, prof: &PrecisionProfile) -> Result<LambdaCycElement, FormatError> {
        if self.p != prof.p {
            return Err(FormatError::ProfileMismatch(self.p, prof.p));
        }
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let coeffs = b.iter().map(|r| r.to_scalar()).collect::<Result<Vec<_>, _>>()?;
                Ok(IwasawaSeries::from_coeffs(coeffs, prof))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(LambdaCycElement { branches })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HhRecord {
    pub p: u64,
    pub cap_n: u32,
    pub series_cap: usize,
    pub h: u32,
    pub floor_bounds: Vec<Option<i64>>,
    pub branches: Vec<Vec<ScalarRecord>>,
}

impl HhRecord {
    pub fn of(e: &HhCycElement, h: u32, prof: &PrecisionProfile) -> Self {
        HhRecord {
            p: prof.p,
            cap_n: prof.cap_n,
            series_cap: prof.series_cap,
            h,
            floor_bounds: e.branches.iter().map(|b| b.floor_bound).collect(),
            branches: e
                .branches
                .iter()
                .map(|b| b.coeffs.iter().map(ScalarRecord::of).collect())
                .collect(),
        }
    }

    pub fn to_element(&self, prof: &PrecisionProfile) -> Result<HhCycElement, FormatError> {
        if self.p != prof.p {
            return Err(FormatError::ProfileMismatch(self.p, prof.p));
        }
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let coeffs = b.iter().map(|r| r.to_scalar()).collect::<Result<Vec<_>, _>>()?;
                Ok(HhSeries::new(coeffs, self.h, prof))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(HhCycElement { branches })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridRecord {
    pub p: u64,
    pub cap_n: u32,
    pub series_cap: usize,
    pub h: u32,
    pub l: i64,
    pub l_prime: i64,
    pub n_max: u32,
    /// entries[n-1][j-l]
    pub entries: Vec<Vec<Vec<ScalarRecord>>>,
}

impl GridRecord {
    pub fn of(g: &CongruenceGrid, h: u32, prof: &PrecisionProfile) -> Self {
        GridRecord {
            p: prof.p,
            cap_n: prof.cap_n,
            series_cap: prof.series_cap,
            h,
            l: g.l,
            l_prime: g.l_prime,
            n_max: g.n_max,
            entries: g
                .entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| e.coeffs.iter().map(ScalarRecord::of).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_grid(&self, prof: &PrecisionProfile) -> Result<CongruenceGrid, FormatError> {
        if self.p != prof.p {
            return Err(FormatError::ProfileMismatch(self.p, prof.p));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        let coeffs =
                            e.iter().map(|r| r.to_scalar()).collect::<Result<Vec<_>, _>>()?;
                        Ok(IwasawaSeries::from_coeffs(coeffs, prof))
                    })
                    .collect::<Result<Vec<_>, FormatError>>()
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(CongruenceGrid { l: self.l, l_prime: self.l_prime, n_max: self.n_max, entries })
    }
}

// ---------------------------------------------------------------------------
// L-function records
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpRecord {
    pub provenance: Provenance,
    pub kind: String,
    pub layer: u32,
    pub slope: i64,
    pub weight: u64,
    pub depleted_at: Vec<u64>,
    pub lambda: Option<LambdaRecord>,
    pub hh: Option<HhRecord>,
    pub window: Option<(i64, i64)>,
}

impl LpRecord {
    pub fn of_body(
        body: &LpBody,
        layer: u32,
        slope: i64,
        weight: u64,
        depleted_at: &[u64],
        prof: &PrecisionProfile,
    ) -> Self {
        match body {
            LpBody::Ordinary(e) => LpRecord {
                provenance: Provenance::new(prof),
                kind: "ordinary".into(),
                layer,
                slope,
                weight,
                depleted_at: depleted_at.to_vec(),
                lambda: Some(LambdaRecord::of(e, prof)),
                hh: None,
                window: None,
            },
            LpBody::FiniteSlope { element, h, l, l_prime, .. } => LpRecord {
                provenance: Provenance::new(prof),
                kind: "finite_slope".into(),
                layer,
                slope,
                weight,
                depleted_at: depleted_at.to_vec(),
                lambda: None,
                hh: Some(HhRecord::of(element, *h, prof)),
                window: Some((*l, *l_prime)),
            },
        }
    }

    pub fn to_body(&self, prof: &PrecisionProfile) -> Result<LpBody, FormatError> {
        match self.kind.as_str() {
            "ordinary" => {
                let lam = self
                    .lambda
                    .as_ref()
                    .ok_or_else(|| FormatError::UnknownKind("missing lambda body".into()))?;
                Ok(LpBody::Ordinary(lam.to_element(prof)?))
            }
            "finite_slope" => {
                let hh = self
                    .hh
                    .as_ref()
                    .ok_or_else(|| FormatError::UnknownKind("missing hh body".into()))?;
                let (l, l_prime) = self.window.unwrap_or((1, 1 + hh.h as i64));
                Ok(LpBody::FiniteSlope {
                    element: hh.to_element(prof)?,
                    h: hh.h,
                    l,
                    l_prime,
                    reports: vec![],
                })
            }
            other => Err(FormatError::UnknownKind(other.to_string())),
        }
    }
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

/// q-expansion fixture: enough exact Hecke eigenvalues to cut out the
/// eigen-symbol and stabilize at p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QExpansionFixture {
    pub label: String,
    pub level: u64,
    pub weight: u64,
    pub character: String,
    /// a_1, a_2, ... as exact rationals "num/den"
    pub coefficients: Vec<String>,
}

impl QExpansionFixture {
    pub fn eigenvalue(&self, ell: u64) -> Result<Option<BigRational>, FormatError> {
        match self.coefficients.get(ell as usize - 1) {
            Some(s) => rational_from_string(s).map(Some),
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyMemberRecord {
    pub k: i64,
    pub slope: i64,
    /// which root of the p-th Hecke polynomial the member is stabilized
    /// with ("small" or "large"); defaults to small
    #[serde(default)]
    pub alpha: Option<String>,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFixtureRecord {
    pub p: u64,
    pub k0: i64,
    pub r: u32,
    pub slope: i64,
    pub members: Vec<FamilyMemberRecord>,
    pub provenance_notes: String,
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycloRecord {
    pub level: u32,
    pub coeffs: Vec<ScalarRecord>,
}

impl CycloRecord {
    pub fn of(c: &CycloScalar) -> Self {
        CycloRecord { level: c.level, coeffs: c.coeffs.iter().map(ScalarRecord::of).collect() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterpolationRecord {
    pub j: i64,
    pub tame: u32,
    pub wild_level: u32,
    pub wild_exp: u64,
    pub lhs: CycloRecord,
    pub rhs: CycloRecord,
    pub certified_precision: i64,
    pub verdict: String,
}

impl InterpolationRecord {
    pub fn of(r: &InterpolationReport) -> Self {
        InterpolationRecord {
            j: r.j,
            tame: r.tame,
            wild_level: r.wild_level,
            wild_exp: r.wild_exp,
            lhs: CycloRecord::of(&r.lhs),
            rhs: CycloRecord::of(&r.rhs),
            certified_precision: r.certified,
            verdict: match r.verdict {
                Verdict::Pass => "pass".into(),
                Verdict::Fail => "fail".into(),
                Verdict::Indeterminate => "indeterminate".into(),
            },
        }
    }
}

/// Glued two-variable object file: the chart data, the node ideal's
/// monic factors, every weight-direction coefficient polynomial, and the
/// certified precision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoVarRecord {
    pub provenance: Provenance,
    pub k0: i64,
    pub r: u32,
    pub points: Vec<i64>,
    pub ideal_generator: Vec<ScalarRecord>,
    pub finite_slope: Option<(u32, i64, i64)>,
    /// branch_coeffs[branch][series_coeff] = weight polynomial
    pub branch_coeffs: Vec<Vec<Vec<ScalarRecord>>>,
    pub certified_abs_precision: i64,
}

impl TwoVarRecord {
    pub fn of(two: &crate::family::TwoVariableL, prof: &PrecisionProfile) -> Self {
        TwoVarRecord {
            provenance: Provenance::new(prof),
            k0: two.disc.k0,
            r: two.disc.r,
            points: two.ideal.points.clone(),
            ideal_generator: two.ideal.generator.coeffs.iter().map(ScalarRecord::of).collect(),
            finite_slope: two.finite_slope,
            branch_coeffs: two
                .branch_coeffs
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| s.coeffs.iter().map(ScalarRecord::of).collect())
                        .collect()
                })
                .collect(),
            certified_abs_precision: two.certified_abs_precision,
        }
    }
}

/// Symbol-space cache: dimensions, the free generators, and the reduced
/// relation data (the expression of every Manin generator in the quotient
/// basis, exact rationals).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceRecord {
    pub level: u64,
    pub weight: u64,
    pub character: String,
    pub dim: usize,
    pub cuspidal_dim: usize,
    pub relation_rank: usize,
    pub p1_size: usize,
    pub free_generators: Vec<usize>,
    pub gen_to_basis: Vec<Vec<String>>,
}

impl SpaceRecord {
    pub fn of(s: &crate::modsym::SymbolSpace) -> Self {
        SpaceRecord {
            level: s.level,
            weight: s.weight,
            character: "trivial".into(),
            dim: s.dim,
            cuspidal_dim: s.cuspidal_basis.len(),
            relation_rank: s.relation_rank,
            p1_size: s.p1.len(),
            free_generators: s.free_generators.clone(),
            gen_to_basis: s
                .generator_basis_rows()
                .iter()
                .map(|row| row.iter().map(rational_to_string).collect())
                .collect(),
        }
    }
}
