use super::*;
use crate::distributions::av_conditions_check;
use crate::iwasawa::specialize;
use crate::modsym::{build_space, find_eigensymbol, p_stabilize, DirichletNebentypus, QAlphaCtx, RootChoice};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn prof() -> PrecisionProfile {
    PrecisionProfile::new(3, 40, 96).unwrap()
}

fn form_11a(prof: &PrecisionProfile) -> (StabilizedForm, SymbolSpace) {
    let s = build_space(11, 2, DirichletNebentypus::Trivial).unwrap();
    let plus = find_eigensymbol(&s, &[(2, rat(-2)), (3, rat(-1))], 1).unwrap();
    let minus = find_eigensymbol(&s, &[(2, rat(-2)), (3, rat(-1))], -1).unwrap();
    let f = p_stabilize(&plus, &minus, &s, 3, RootChoice::SmallSlope, prof).unwrap();
    (f, s)
}

fn form_delta(prof: &PrecisionProfile) -> (StabilizedForm, SymbolSpace) {
    let s = build_space(1, 12, DirichletNebentypus::Trivial).unwrap();
    let mut plus = find_eigensymbol(&s, &[(2, rat(-24))], 1).unwrap();
    let mut minus = find_eigensymbol(&s, &[(2, rat(-24))], -1).unwrap();
    plus.eigenvalues.insert(3, rat(252));
    minus.eigenvalues.insert(3, rat(252));
    let f = p_stabilize(&plus, &minus, &s, 3, RootChoice::SmallSlope, prof).unwrap();
    (f, s)
}

#[test]
fn distribution_relation_both_forms() {
    let prof = prof();
    for (form, space) in [form_11a(&prof), form_delta(&prof)] {
        let mts: Vec<MazurTateElement> =
            (1..=4).map(|n| mazur_tate(&form, &space, n)).collect();
        for win in mts.windows(2) {
            let (ok, defects) = norm_compatibility_check(&win[1], &win[0], &form);
            assert!(ok, "layer {} -> {}: defects {:?}", win[1].layer, win[0].layer, defects);
        }
    }
}

#[test]
fn perturbed_layer_is_detected() {
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let mt1 = mazur_tate(&form, &space, 1);
    let mut mt2 = mazur_tate(&form, &space, 2);
    let key = *mt2.values.keys().next().unwrap();
    mt2.values.get_mut(&key).unwrap()[0] =
        mt2.values[&key][0].add(&QAlpha::one());
    let (ok, defects) = norm_compatibility_check(&mt2, &mt1, &form);
    assert!(!ok);
    assert_eq!(defects.len(), 1);
    assert_eq!(defects[0], (key % 3, 0));
}

#[test]
fn mismatched_root_breaks_the_tower_globally() {
    // the formal Q(alpha) layer data is root-agnostic; the choice of root
    // enters through the p-adic scaling. Scaling one layer with the wrong
    // root shifts every evaluation at once: the layer-stable moments stop
    // agreeing between depths, at every character
    let prof = prof();
    let s = build_space(11, 2, DirichletNebentypus::Trivial).unwrap();
    let plus = find_eigensymbol(&s, &[(2, rat(-2)), (3, rat(-1))], 1).unwrap();
    let minus = find_eigensymbol(&s, &[(2, rat(-2)), (3, rat(-1))], -1).unwrap();
    let small = p_stabilize(&plus, &minus, &s, 3, crate::modsym::RootChoice::SmallSlope, &prof).unwrap();
    let large = p_stabilize(&plus, &minus, &s, 3, crate::modsym::RootChoice::LargeSlope, &prof).unwrap();
    let mt1 = mazur_tate(&small, &s, 1);
    let mt2 = mazur_tate(&small, &s, 2);
    for phi in [
        PadicCharacter::trivial(),
        PadicCharacter::finite(1, 0, 0, &prof).unwrap(),
    ] {
        let v1 = exact_moment(&mt1, &small, 1, &phi, &prof).unwrap();
        let v2 = exact_moment(&mt2, &small, 1, &phi, &prof).unwrap();
        assert!(v1.eq_at_precision(&v2, &prof), "correct root: layer-stable");
        let v2_wrong = exact_moment(&mt2, &large, 1, &phi, &prof).unwrap();
        assert!(
            !v2_wrong.sub(&v1, &prof).is_zero_at_precision(),
            "wrong root must break stability at tame {}",
            phi.tame
        );
    }
}

#[test]
fn euler_polynomial_with_vanishing_eigenvalue() {
    // a_q = 0: the linear term drops and only 1 + psi(q) q^{k-1} [s]^2 X^2
    // remains
    let prof = prof();
    let ep = euler_polynomial(2, &rat(0), 1, 2, &prof).unwrap();
    assert!(ep.coeffs[1].eq_at_precision(&LambdaCycElement::zero(&prof), &prof));
    let sig = LambdaCycElement::group_like(
        &PadicScalar::from_ratio(BigInt::one(), BigInt::from(2), &prof).unwrap(),
        &prof,
    )
    .unwrap();
    let want = sig.mul(&sig, &prof).scalar_mul(&PadicScalar::from_u64(2, &prof), &prof);
    assert!(ep.coeffs[2].eq_at_precision(&want, &prof));
}

#[test]
fn layer_one_aggregate_is_euler_corrected_symbol_value() {
    // sum over units of the layer-1 values = (1 - alpha^{-1}) lambda({oo,0});
    // in the alpha-scaled representation: sum of numerators =
    // (alpha - 1) lambda({oo,0})
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let mt = mazur_tate(&form, &space, 1);
    let mut total = QAlpha::zero();
    for v in mt.values.values() {
        total = total.add(&v[0]);
    }
    let w = vec![BigRational::one()];
    let base = form
        .eval(&space, 1, &w, &CuspPt::Infinity, &CuspPt::Finite(BigRational::zero()))
        .add(&form.eval(&space, -1, &w, &CuspPt::Infinity, &CuspPt::Finite(BigRational::zero())));
    let expect = form.alpha.mul(&base, &form.ctx).sub(&base);
    assert_eq!(total, expect);
}

#[test]
fn ordinary_values_are_integral_and_slope_values_drop() {
    let prof = prof();
    let (form, space) = form_11a(&prof);
    for n in 1..=3u32 {
        let mt = mazur_tate(&form, &space, n);
        let floor = embedded_value_floor(&mt, &form, &prof);
        assert!(floor >= 0, "ordinary layer {} floor {}", n, floor);
    }
    // slope-2 stabilization: the floor drops by about s = 2 per layer
    let (form, space) = form_delta(&prof);
    let floors: Vec<i64> = (1..=3u32)
        .map(|n| embedded_value_floor(&mazur_tate(&form, &space, n), &form, &prof))
        .collect();
    assert!(floors[1] <= floors[0] - 1, "floors: {:?}", floors);
    assert!(floors[2] <= floors[1] - 1, "floors: {:?}", floors);
}

#[test]
fn sigma_equivariance_of_group_ring_form() {
    // relabeling a -> ua permutes the clean moments consistently:
    // sum phi(a) v_{n, ua} = phi(u)^{-1} sum phi(a) v_{n, a}
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let mt = mazur_tate(&form, &space, 2);
    let phi = PadicCharacter::finite(1, 0, 0, &prof).unwrap();
    let direct = exact_moment(&mt, &form, 1, &phi, &prof).unwrap();
    // relabeled: sum_a phi(a) v_{2, 2a mod 9}
    let u = 2u64;
    let mut relabeled = CycloScalar::zero(prof.p, 0);
    for (a, vals) in &mt.values {
        let ua = (a * u) % mt.modulus;
        let phia = phi.eval_finite_at_u64(a % 3, &prof).unwrap();
        let term = phia.scalar_mul(&mt.values[&ua][0].embed(&form.alpha_p, &prof).unwrap(), &prof);
        let _ = vals;
        relabeled = relabeled.add(&term, &prof);
    }
    let relabeled = relabeled.scalar_mul(&alpha_scale(&form, mt.layer, &prof).unwrap(), &prof);
    let phiu = phi.eval_finite_at_u64(u, &prof).unwrap();
    assert!(relabeled.mul(&phiu, &prof).eq_at_precision(&direct, &prof));
}

#[test]
fn euler_factor_formulas() {
    let prof = prof();
    let (form, _space) = form_11a(&prof);
    // trivial phi, j = 1, alpha the unit root of X^2 + X + 3:
    // e_p = 1 - 1/alpha
    let triv = PadicCharacter::trivial();
    let e = euler_factor(&form, 1, &triv);
    let direct = QAlpha::one().sub(&form.alpha.inv(&form.ctx));
    assert_eq!(e, direct);
    // conductor p^2: (p^{j-1}/alpha)^2 = alpha^{-2} at j = 1
    let phi = PadicCharacter::finite(0, 1, 1, &prof).unwrap();
    let e = euler_factor(&form, 1, &phi);
    assert_eq!(e, form.alpha.inv(&form.ctx).pow(2, &form.ctx));
}

#[test]
fn ordinary_lp_interpolates_11a() {
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let lp = build_lp_ordinary(&form, &space, 4, &prof).unwrap();
    // (j, phi) = (1, trivial) plus every character of conductor 3 and 9
    let mut pairs: Vec<PadicCharacter> = vec![PadicCharacter::trivial()];
    pairs.push(PadicCharacter::finite(1, 0, 0, &prof).unwrap());
    for tame in 0..2u32 {
        for we in [1u64, 2] {
            pairs.push(PadicCharacter::finite(tame, 1, we, &prof).unwrap());
        }
    }
    for phi in pairs {
        let rep = check_interpolation(&lp, &form, &space, 1, &phi, &prof).unwrap();
        assert!(
            rep.certified >= 3,
            "certified {} too weak for tame={} wild={}",
            rep.certified,
            phi.tame,
            phi.wild_exp
        );
        assert_eq!(
            rep.verdict,
            Verdict::Pass,
            "interpolation fails at tame={} wild_level={} wild_exp={} (certified {})",
            phi.tame,
            phi.wild_level,
            phi.wild_exp,
            rep.certified
        );
    }
}

#[test]
fn trivial_zero_is_reported_as_zero_factor_not_error() {
    // e_p(f,1,1) = 1 - 1/a_p vanishes iff a_p = 1; the formula is exact and
    // the vanishing is visible in Q(alpha) arithmetic
    let ctx = QAlphaCtx { trace: rat(1), norm: rat(3) };
    let alpha = QAlpha::alpha();
    let e = QAlpha::one().sub(&alpha.inv(&ctx));
    // here alpha has norm 3 so e is nonzero; in the weight-2 a_p = 1 case
    // the unit root is 1 and e = 1 - 1/1 = 0, a reported zero of the
    // interpolation factor rather than an error:
    let e_trivial_zero = QAlpha::one().sub(&QAlpha::one());
    assert!(e_trivial_zero.is_zero());
    assert!(!e.is_zero());
}

#[test]
fn branch_selection_reads_single_branch() {
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let lp = build_lp_ordinary(&form, &space, 3, &prof).unwrap();
    let LpBody::Ordinary(e) = &lp.body else { unreachable!() };
    // chi^1 phi with phi the odd tame character reads branch (1+1) mod 2 = 0;
    // with trivial phi it reads branch 1
    let odd = PadicCharacter::finite(1, 0, 0, &prof).unwrap().with_cyc_power(1);
    let (val_odd, _) = specialize_lp(&lp, &odd, &prof).unwrap();
    let from_branch0 = specialize(&e.branches[0], &odd, &prof).unwrap();
    assert!(val_odd.eq_at_precision(&from_branch0, &prof));
    let triv = PadicCharacter::trivial().with_cyc_power(1);
    let (val_triv, _) = specialize_lp(&lp, &triv, &prof).unwrap();
    let from_branch1 = specialize(&e.branches[1], &triv, &prof).unwrap();
    assert!(val_triv.eq_at_precision(&from_branch1, &prof));
}

#[test]
fn finite_slope_lp_delta() {
    let prof = prof();
    let (form, space) = form_delta(&prof);
    assert_eq!(form.slope, 2);
    // h below slope is refused
    let err = build_lp_finite_slope(&form, &space, 1, 4, &prof);
    assert!(matches!(err, Err(PlfnError::OrderBelowSlope { .. })));

    let lp = build_lp_finite_slope(&form, &space, 2, 4, &prof).unwrap();
    let LpBody::FiniteSlope { l, l_prime, reports, element, .. } = &lp.body else {
        unreachable!()
    };
    assert_eq!((*l, *l_prime), (3, 5));
    for r in reports {
        assert!(r.cond_congruence, "{}", r.describe());
        assert!(r.cond_growth.pass, "{}", r.describe());
    }
    // interpolation at window pairs
    let mut passes = 0;
    for j in *l..=*l_prime {
        for phi in [
            PadicCharacter::trivial(),
            PadicCharacter::finite(1, 0, 0, &prof).unwrap(),
            PadicCharacter::finite(0, 1, 1, &prof).unwrap(),
        ] {
            let rep = check_interpolation(&lp, &form, &space, j, &phi, &prof).unwrap();
            if rep.certified >= 2 {
                assert_eq!(
                    rep.verdict,
                    Verdict::Pass,
                    "fail at j={} tame={} wl={} certified={}",
                    j,
                    phi.tame,
                    phi.wild_level,
                    rep.certified
                );
                passes += 1;
            }
        }
    }
    assert!(passes >= 4, "only {} certified window pairs", passes);
    // the glued element has the declared growth
    let floor = element.min_floor().unwrap();
    assert!(floor > i64::MIN);
}

#[test]
fn layerwise_grid_diverges_below_slope() {
    // with the window at the left edge of the critical range, the columns
    // with j - 1 < slope carry the alpha^{-n} denominator growth; declaring
    // h = slope - 1 shows up as an unbounded condition-(i) scan
    let prof = prof();
    let (form, space) = form_delta(&prof);
    let grid = layerwise_grid(&form, &space, 1, 2, 3, 0, &prof).unwrap();
    let report = av_conditions_check(&grid, 0, &prof).unwrap();
    assert!(
        !report.cond_growth.pass,
        "condition (i) must diverge for h below the slope: {:?}",
        report.cond_growth.table
    );
    // declared at the true slope the same scan is bounded
    let report2 = av_conditions_check(&grid, 2, &prof).unwrap();
    assert!(report2.cond_growth.pass, "{:?}", report2.cond_growth.table);
}

#[test]
fn ordinary_form_through_h0_glue_path_matches_measure_path() {
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let lp_measure = build_lp_ordinary(&form, &space, 3, &prof).unwrap();
    let lp_glue = build_lp_finite_slope(&form, &space, 0, 3, &prof).unwrap();
    // compare through evaluations at the window character chi^1 phi across
    // both branches, digit-exact at the certified precision
    for phi in [
        PadicCharacter::trivial(),
        PadicCharacter::finite(1, 0, 0, &prof).unwrap(),
        PadicCharacter::finite(0, 1, 1, &prof).unwrap(),
    ] {
        let chi = phi.with_cyc_power(1);
        let (a, ca) = specialize_lp(&lp_measure, &chi, &prof).unwrap();
        let (b, cb) = specialize_lp(&lp_glue, &chi, &prof).unwrap();
        let c = ca.min(cb).min(prof.cap_n as i64);
        assert!(c >= 3);
        let at = a.truncate_abs_precision(c, &prof);
        let bt = b.truncate_abs_precision(c, &prof);
        assert!(at.eq_at_precision(&bt, &prof), "paths disagree at tame={}", phi.tame);
    }
}

#[test]
fn euler_polynomial_shape_and_depletion() {
    let prof = prof();
    // weight 2, trivial psi, a_2 = -2: P_2 = 1 + 2 [s] X + 2 [s]^2 X^2
    let ep = euler_polynomial(2, &rat(-2), 1, 2, &prof).unwrap();
    let sig = LambdaCycElement::group_like(
        &PadicScalar::from_ratio(BigInt::one(), BigInt::from(2), &prof).unwrap(),
        &prof,
    )
    .unwrap();
    let c1_expect = sig.scalar_mul(&PadicScalar::from_u64(2, &prof), &prof);
    assert!(ep.coeffs[1].eq_at_precision(&c1_expect, &prof));
    let c2_expect = sig.mul(&sig, &prof).scalar_mul(&PadicScalar::from_u64(2, &prof), &prof);
    assert!(ep.coeffs[2].eq_at_precision(&c2_expect, &prof));

    // depletion then re-division recovers the original evaluations where
    // the factor is a unit
    let (form, space) = form_11a(&prof);
    let lp = build_lp_ordinary(&form, &space, 3, &prof).unwrap();
    let dep = remove_euler_factors(&lp, &[(2, rat(-2))], space.level, &space.character, &prof).unwrap();
    assert_eq!(dep.depleted_at, vec![2]);
    let chi = PadicCharacter::trivial().with_cyc_power(1);
    let (v0, _) = specialize_lp(&lp, &chi, &prof).unwrap();
    let (v1, _) = specialize_lp(&dep, &chi, &prof).unwrap();
    // the depletion multiplier evaluated at the same character
    let factor = {
        let d = ep.depletion_element(&prof);
        crate::iwasawa::specialize_semilocal(&d, &chi, &prof).unwrap()
    };
    assert!(v1.eq_at_precision(&v0.mul(&factor, &prof), &prof));
    // dividing back where the factor is a unit
    let f0 = factor.coeffs[0].clone();
    assert_eq!(f0.valuation(&prof), Some(0), "depletion factor is a unit here");
    // r = 1 depletion is the identity
    let same = remove_euler_factors(&lp, &[], space.level, &space.character, &prof).unwrap();
    let (v2, _) = specialize_lp(&same, &chi, &prof).unwrap();
    assert!(v2.eq_at_precision(&v0, &prof));
    // r sharing a factor with the level is rejected
    assert!(matches!(
        remove_euler_factors(&lp, &[(11, rat(1))], space.level, &space.character, &prof),
        Err(PlfnError::BadDepletionIndex(11))
    ));
}

#[test]
fn depletion_multiplicative_over_prime_factors() {
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let lp = build_lp_ordinary(&form, &space, 3, &prof).unwrap();
    let a2 = rat(-2);
    let a7 = rat(-2);
    let both = remove_euler_factors(
        &lp,
        &[(2, a2.clone()), (7, a7.clone())],
        space.level,
        &space.character,
        &prof,
    )
    .unwrap();
    let one_then_other = remove_euler_factors(
        &remove_euler_factors(&lp, &[(2, a2)], space.level, &space.character, &prof).unwrap(),
        &[(7, a7)],
        space.level,
        &space.character,
        &prof,
    )
    .unwrap();
    let chi = PadicCharacter::finite(1, 0, 0, &prof).unwrap().with_cyc_power(1);
    let (a, _) = specialize_lp(&both, &chi, &prof).unwrap();
    let (b, _) = specialize_lp(&one_then_other, &chi, &prof).unwrap();
    assert!(a.eq_at_precision(&b, &prof));
}

#[test]
fn mu_lambda_of_11a_lp_matches_coefficient_scan() {
    let prof = prof();
    let (form, space) = form_11a(&prof);
    let lp = build_lp_ordinary(&form, &space, 4, &prof).unwrap();
    let LpBody::Ordinary(e) = &lp.body else { unreachable!() };
    for b in &e.branches {
        if b.is_zero_at_precision() {
            continue;
        }
        let w = crate::iwasawa::weierstrass_prepare(b, &prof).unwrap();
        let np = crate::oracles::newton_polygon_mu_lambda(b, &prof).unwrap();
        assert_eq!((w.mu, w.lambda), np);
    }
}
