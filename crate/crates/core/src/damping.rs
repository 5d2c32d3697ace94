//! Analytic existence ("damping") conditions.
//!
//! For joins with `mu1, mu2 > 0`, the main existence theorem asks for D1:
//!
//! ```text
//!   m1 in {2, 3}
//!   or (m1 - 3)^2 < 4 mu1
//!   or sqrt((m2-1)^2 + 4 l2) + sqrt((m1-3)^2 - 4 mu1) < m1 + m2 - 4
//! ```
//!
//! together with the mirrored D2. With `m2 = 1`, `mu2 = 0`, `l2 = k^2` the
//! third clause becomes `2|k| + sqrt((m1-3)^2 - 4 mu1) < m1 - 3`. For
//! suspensions the minimizer exists iff `mu1 > m1 - 3` (always for
//! `m1 in {2, 3}`), and there are countably many solutions when
//! `m1 >= 4` and `mu1 > (m1-3)^2 / 4`.
//!
//! Strict inequalities are decided in exact rational arithmetic whenever the
//! inputs are exact (all catalog eigenmaps); user-supplied floats fall back
//! to a declared comparison band. The conditions are sufficient only: an
//! unsatisfied report means "existence unknown", never "nonexistent".

use crate::eigenmaps::Eigenmap;
use crate::exact::{sqrt_strictly_less, sqrt_sum_strictly_less, strictly_less, Scalar};
use crate::functional::JoinProblem;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionSet {
    D1,
    D2,
    Main2,
    Suspension,
}

/// One clause: label, verdict (`None` = not applicable), the numeric
/// quantities that entered it, and its signed margin (positive = satisfied,
/// in the clause's own scale).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClauseValue {
    pub label: String,
    pub holds: Option<bool>,
    pub quantities: Vec<(String, f64)>,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DampingReport {
    pub condition: ConditionSet,
    pub clauses: Vec<ClauseValue>,
    /// Disjunction of the applicable clauses (for Suspension: the
    /// minimizer-existence flag).
    pub satisfied: bool,
    /// Largest clause margin; positive iff satisfied (infinite when a
    /// discrete membership clause decides).
    pub margin: f64,
}

impl DampingReport {
    pub fn clause(&self, label: &str) -> Option<&ClauseValue> {
        self.clauses.iter().find(|c| c.label == label)
    }

    /// The countable-multiplicity flag of a suspension report.
    pub fn countably_many(&self) -> Option<bool> {
        self.clause("countably_many").and_then(|c| c.holds)
    }

    pub fn verdict_string(&self) -> &'static str {
        if self.satisfied {
            "satisfied"
        } else {
            "existence unknown"
        }
    }

    fn finish(condition: ConditionSet, clauses: Vec<ClauseValue>, satisfied: bool) -> Self {
        let margin = clauses
            .iter()
            .filter_map(|c| c.margin)
            .fold(f64::NEG_INFINITY, f64::max);
        DampingReport {
            condition,
            clauses,
            satisfied,
            margin,
        }
    }
}

/// Shared core of D1 and its mirror: the instability condition of the
/// constant solution where the `(mv, lv, uv)` factor vanishes and the other
/// factor (`mo`, `lo`) stays. For D1 on `(m1, m2)`: `mv = m1`, `uv = mu1`,
/// `mo = m2`, `lo = lambda2`.
fn check_instability(
    condition: ConditionSet,
    mv: u32,
    uv: &Scalar,
    mo: u32,
    lo: &Scalar,
) -> Result<DampingReport> {
    if mv < 2 {
        return Err(Error::Problem("damping check needs m >= 2".into()));
    }
    if !(uv.as_f64() > 0.0) {
        return Err(Error::Problem(
            "damping check needs mu > 0 (use the m2 = 1 or suspension conditions)".into(),
        ));
    }
    let mvf = mv as f64;
    let mof = mo as f64;
    let side = match condition {
        ConditionSet::D2 => "m2",
        _ => "m1",
    };

    // clause a: mv in {2, 3}
    let a_holds = mv == 2 || mv == 3;
    let clause_a = ClauseValue {
        label: format!("{side} in {{2,3}}"),
        holds: Some(a_holds),
        quantities: vec![(side.to_string(), mvf)],
        margin: if a_holds { Some(f64::INFINITY) } else { None },
    };

    // clause b: (mv-3)^2 < 4 uv
    let lhs_b = Scalar::from_int((mv as i128 - 3) * (mv as i128 - 3));
    let rhs_b = uv.scale_int(4);
    let b_holds = strictly_less(&lhs_b, &rhs_b);
    let clause_b = ClauseValue {
        label: format!("({side}-3)^2 < 4 mu"),
        holds: Some(b_holds),
        quantities: vec![
            ("lhs".into(), lhs_b.as_f64()),
            ("rhs".into(), rhs_b.as_f64()),
        ],
        margin: Some(rhs_b.as_f64() - lhs_b.as_f64()),
    };

    // clause c, only when b fails (then the radicand is >= 0)
    let clause_c = if b_holds {
        ClauseValue {
            label: "sqrt sum".into(),
            holds: None,
            quantities: vec![],
            margin: None,
        }
    } else {
        let x = Scalar::from_int((mo as i128 - 1) * (mo as i128 - 1)).add(&lo.scale_int(4));
        let y = lhs_b.sub(&rhs_b);
        let z = Scalar::from_int(mv as i128 + mo as i128 - 4);
        let holds = sqrt_sum_strictly_less(&x, &y, &z);
        let sqrt_sum = x.as_f64().max(0.0).sqrt() + y.as_f64().max(0.0).sqrt();
        ClauseValue {
            label: "sqrt sum".into(),
            holds: Some(holds),
            quantities: vec![
                ("sqrt((mo-1)^2+4 lo)".into(), x.as_f64().max(0.0).sqrt()),
                ("sqrt((mv-3)^2-4 uv)".into(), y.as_f64().max(0.0).sqrt()),
                ("m1+m2-4".into(), mvf + mof - 4.0),
            ],
            margin: Some(mvf + mof - 4.0 - sqrt_sum),
        }
    };

    let satisfied = a_holds || b_holds || clause_c.holds == Some(true);
    Ok(DampingReport::finish(
        condition,
        vec![clause_a, clause_b, clause_c],
        satisfied,
    ))
}

/// D1: instability of the constant solution `(0, 1)`; needs `m1 >= 2`,
/// `mu1 > 0`.
pub fn check_d1(p: &JoinProblem) -> Result<DampingReport> {
    check_instability(
        ConditionSet::D1,
        p.m1,
        &p.eig1.mu,
        p.m2,
        &p.eig2.lambda,
    )
}

/// D2: the mirrored condition for `(1, 0)`; needs `m2 >= 2`, `mu2 > 0`.
pub fn check_d2(p: &JoinProblem) -> Result<DampingReport> {
    check_instability(
        ConditionSet::D2,
        p.m2,
        &p.eig2.mu,
        p.m1,
        &p.eig1.lambda,
    )
}

/// The `m2 = 1` condition: clauses a and b as in D1, and
/// `2|k| + sqrt((m1-3)^2 - 4 mu1) < m1 - 3` for the third clause.
pub fn check_main2(m1: u32, mu1: &Scalar, k: i32) -> Result<DampingReport> {
    if k == 0 {
        return Err(Error::Problem("main2 needs k != 0".into()));
    }
    if m1 < 2 || !(mu1.as_f64() > 0.0) {
        return Err(Error::Problem("main2 needs m1 >= 2 and mu1 > 0".into()));
    }
    let m1f = m1 as f64;
    let a_holds = m1 == 2 || m1 == 3;
    let clause_a = ClauseValue {
        label: "m1 in {2,3}".into(),
        holds: Some(a_holds),
        quantities: vec![("m1".into(), m1f)],
        margin: if a_holds { Some(f64::INFINITY) } else { None },
    };
    let lhs_b = Scalar::from_int((m1 as i128 - 3) * (m1 as i128 - 3));
    let rhs_b = mu1.scale_int(4);
    let b_holds = strictly_less(&lhs_b, &rhs_b);
    let clause_b = ClauseValue {
        label: "(m1-3)^2 < 4 mu1".into(),
        holds: Some(b_holds),
        quantities: vec![
            ("lhs".into(), lhs_b.as_f64()),
            ("rhs".into(), rhs_b.as_f64()),
        ],
        margin: Some(rhs_b.as_f64() - lhs_b.as_f64()),
    };
    let clause_c = if b_holds {
        ClauseValue {
            label: "sqrt clause".into(),
            holds: None,
            quantities: vec![],
            margin: None,
        }
    } else {
        let y = lhs_b.sub(&rhs_b);
        let z = Scalar::from_int(m1 as i128 - 3 - 2 * (k.unsigned_abs() as i128));
        let holds = sqrt_strictly_less(&y, &z);
        let sqrt_y = y.as_f64().max(0.0).sqrt();
        ClauseValue {
            label: "sqrt clause".into(),
            holds: Some(holds),
            quantities: vec![
                ("2|k|".into(), 2.0 * k.unsigned_abs() as f64),
                ("sqrt((m1-3)^2-4 mu1)".into(), sqrt_y),
                ("m1-3".into(), m1f - 3.0),
            ],
            margin: Some(m1f - 3.0 - 2.0 * k.unsigned_abs() as f64 - sqrt_y),
        }
    };
    let satisfied = a_holds || b_holds || clause_c.holds == Some(true);
    Ok(DampingReport::finish(
        ConditionSet::Main2,
        vec![clause_a, clause_b, clause_c],
        satisfied,
    ))
}

/// Suspension thresholds: minimizer existence
/// (`m1 in {2,3}` or `mu1 > m1 - 3`) and countable multiplicity
/// (`m1 >= 4` and `mu1 > (m1-3)^2/4`), reported independently.
pub fn check_suspension(m1: u32, mu1: &Scalar) -> Result<DampingReport> {
    if m1 < 2 || !(mu1.as_f64() > 0.0) {
        return Err(Error::Problem("suspension check needs m1 >= 2 and mu1 > 0".into()));
    }
    let m1f = m1 as f64;
    let small = m1 == 2 || m1 == 3;
    let threshold = Scalar::from_int(m1 as i128 - 3);
    let above = strictly_less(&threshold, mu1);
    let existence = small || above;
    let clause_small = ClauseValue {
        label: "m1 in {2,3}".into(),
        holds: Some(small),
        quantities: vec![("m1".into(), m1f)],
        margin: if small { Some(f64::INFINITY) } else { None },
    };
    let clause_threshold = ClauseValue {
        label: "mu1 > m1 - 3".into(),
        holds: Some(above),
        quantities: vec![
            ("mu1".into(), mu1.as_f64()),
            ("m1-3".into(), m1f - 3.0),
        ],
        margin: Some(mu1.as_f64() - (m1f - 3.0)),
    };
    // countable multiplicity: m1 >= 4 and mu1 > (m1-3)^2/4
    let quarter = Scalar::ratio((m1 as i128 - 3) * (m1 as i128 - 3), 4);
    let cm = m1 >= 4 && strictly_less(&quarter, mu1);
    let clause_cm = ClauseValue {
        label: "countably_many".into(),
        holds: Some(cm),
        quantities: vec![
            ("mu1".into(), mu1.as_f64()),
            ("(m1-3)^2/4".into(), quarter.as_f64()),
        ],
        margin: if m1 >= 4 {
            Some(mu1.as_f64() - quarter.as_f64())
        } else {
            None
        },
    };
    let mut report = DampingReport::finish(
        ConditionSet::Suspension,
        vec![clause_small, clause_threshold, clause_cm],
        existence,
    );
    // the headline margin tracks the existence flag only
    report.margin = if small {
        f64::INFINITY
    } else {
        mu1.as_f64() - (m1f - 3.0)
    };
    Ok(report)
}

/// One row of a parameter sweep: the pair, its data, and every applicable
/// condition report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub spec1: String,
    pub spec2: String,
    pub m1: u32,
    pub m2: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub d1: Option<DampingReport>,
    pub d2: Option<DampingReport>,
    pub main2: Option<DampingReport>,
    /// Conjunction of the applicable theorem conditions, when a theorem
    /// applies to this parameter combination at all.
    pub satisfied: Option<bool>,
}

/// Deterministic enumeration over explicit eigenmap pairs.
pub fn sweep(pairs: &[(Eigenmap, Eigenmap)]) -> Vec<SweepRow> {
    pairs
        .iter()
        .map(|(e1, e2)| sweep_row(e1, e2))
        .collect()
}

fn sweep_row(e1: &Eigenmap, e2: &Eigenmap) -> SweepRow {
    let base = |d1, d2, main2, satisfied| SweepRow {
        spec1: e1.spec_string(),
        spec2: e2.spec_string(),
        m1: e1.m,
        m2: e2.m,
        lambda1: e1.lambda_f64(),
        lambda2: e2.lambda_f64(),
        mu1: e1.mu_f64(),
        mu2: e2.mu_f64(),
        d1,
        d2,
        main2,
        satisfied,
    };
    match JoinProblem::new(e1.clone(), e2.clone()) {
        Err(_) => base(None, None, None, None),
        Ok(p) => {
            if p.m2 == 1 {
                // the theorem needs lambda2 = k^2 for an integer winding k
                let k = if e2.ell > 0 {
                    Some(e2.ell as i32)
                } else {
                    let root = p.lambda2.sqrt();
                    if (root - root.round()).abs() < 1e-9 && root.round() >= 1.0 {
                        Some(root.round() as i32)
                    } else {
                        None
                    }
                };
                let main2 = k.and_then(|k| check_main2(p.m1, &p.eig1.mu, k).ok());
                let sat = main2.as_ref().map(|r| r.satisfied);
                base(None, None, main2, sat)
            } else {
                let d1 = check_d1(&p).ok();
                let d2 = check_d2(&p).ok();
                let sat = match (&d1, &d2) {
                    (Some(a), Some(b)) => Some(a.satisfied && b.satisfied),
                    _ => None,
                };
                base(d1, d2, main2_not_applicable(), sat)
            }
        }
    }
}

fn main2_not_applicable() -> Option<DampingReport> {
    None
}

/// CSV header and rows for sweep output; columns fixed.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "spec1,spec2,m1,m2,lambda1,lambda2,mu1,mu2,d1,d2,main2,satisfied,d1_margin,d2_margin\n",
    );
    let flag = |r: &Option<DampingReport>| match r {
        Some(rep) => {
            if rep.satisfied {
                "true".to_string()
            } else {
                "false".to_string()
            }
        }
        None => "n/a".to_string(),
    };
    let marg = |r: &Option<DampingReport>| match r {
        Some(rep) => format!("{:.6}", rep.margin),
        None => "n/a".to_string(),
    };
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.spec1,
            r.spec2,
            r.m1,
            r.m2,
            r.lambda1,
            r.lambda2,
            r.mu1,
            r.mu2,
            flag(&r.d1),
            flag(&r.d2),
            flag(&r.main2),
            r.satisfied.map(|b| b.to_string()).unwrap_or("n/a".into()),
            marg(&r.d1),
            marg(&r.d2),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenmaps::Eigenmap;

    fn id_join(m1: u32, m2: u32) -> JoinProblem {
        JoinProblem::new(Eigenmap::identity(m1).unwrap(), Eigenmap::identity(m2).unwrap()).unwrap()
    }

    #[test]
    fn d1_examples() {
        // (id_4, id_4): clause b, 1 < 12
        let r = check_d1(&id_join(4, 4)).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.clauses[1].holds, Some(true));
        assert_eq!(r.clauses[2].holds, None); // c not applicable

        // (id_9, id_2): b fails (36 >= 32), c holds (3 + 2 = 5 < 7)
        let r = check_d1(&id_join(9, 2)).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.clauses[1].holds, Some(false));
        assert_eq!(r.clauses[2].holds, Some(true));

        // m1 = 2: clause a
        let r = check_d1(&id_join(2, 5)).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.clauses[0].holds, Some(true));

        // mu1 = 0 rejected
        let c = Eigenmap::circle_power(2).unwrap();
        assert!(JoinProblem::new(c, Eigenmap::identity(4).unwrap()).is_err());
    }

    #[test]
    fn d2_clause_b_flips_at_m2_9_for_identities() {
        // (m2-3)^2 < 4(m2-1) iff m2 <= 8
        for m2 in 2..=12 {
            let r = check_d2(&id_join(4, m2)).unwrap();
            assert_eq!(
                r.clauses[1].holds,
                Some(m2 <= 8),
                "clause b at m2 = {m2}"
            );
        }
    }

    #[test]
    fn d2_flips_overall_for_standard_immersion_times_identity() {
        // lambda1 = ell(ell + m1 - 1) >= 2 m1 + 2 for ell >= 2 kills the
        // sqrt clause at m2 = 9, with exact equality at ell = 2.
        for ell in [2u32, 3] {
            for m1 in 2..=6 {
                let h = Eigenmap::standard_immersion(m1, ell).unwrap();
                let p8 = JoinProblem::new(h.clone(), Eigenmap::identity(8).unwrap()).unwrap();
                let p9 = JoinProblem::new(h, Eigenmap::identity(9).unwrap()).unwrap();
                assert!(check_d2(&p8).unwrap().satisfied, "(m1, ell) = ({m1}, {ell})");
                assert!(
                    !check_d2(&p9).unwrap().satisfied,
                    "(m1, ell) = ({m1}, {ell}) at m2 = 9"
                );
            }
        }
        // identity first factor keeps D2 alive at m2 = 9 via the sqrt
        // clause: lambda1 = m1 < 2 m1 + 2
        assert!(check_d2(&id_join(4, 9)).unwrap().satisfied);
    }

    #[test]
    fn swap_symmetry() {
        for (m1, m2) in [(4, 9), (9, 2), (5, 7), (2, 12)] {
            let p = id_join(m1, m2);
            let r1 = check_d1(&p).unwrap();
            let r2 = check_d2(&p.swapped()).unwrap();
            assert_eq!(r1.satisfied, r2.satisfied);
            for (c1, c2) in r1.clauses.iter().zip(&r2.clauses) {
                assert_eq!(c1.holds, c2.holds, "({m1},{m2}) clause {}", c1.label);
            }
        }
    }

    #[test]
    fn main2_examples() {
        let mu = Scalar::from_int(3);
        let r = check_main2(4, &mu, 1).unwrap();
        assert!(r.satisfied); // clause b: 1 < 12
        assert!(check_main2(2, &Scalar::from_int(1), 5).unwrap().satisfied); // clause a
        assert!(check_main2(4, &mu, 0).is_err());
        // clause c needs m1 >= 6: with mu tiny and k = 1,
        // 2 + sqrt((m1-3)^2 - 4 mu) < m1 - 3 can hold only for larger m1
        let tiny = Scalar::ratio(1, 100);
        let r5 = check_main2(5, &tiny, 1).unwrap();
        assert!(!r5.satisfied);
        assert_eq!(r5.clauses[2].holds, Some(false));
        // clause c holds iff m1 - 4 < mu1 <= (m1-3)^2/4 for k = 1:
        // at m1 = 12, mu1 = 10: 2 + sqrt(41) ~ 8.403 < 9
        let r12 = check_main2(12, &Scalar::from_int(10), 1).unwrap();
        assert!(r12.satisfied, "{r12:?}");
        assert_eq!(r12.clauses[2].holds, Some(true));
    }

    #[test]
    fn suspension_thresholds() {
        let r = check_suspension(4, &Scalar::from_int(3)).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.countably_many(), Some(true));

        // (6, 2.9): existence fails, countably many holds
        let r = check_suspension(6, &Scalar::ratio(29, 10)).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.countably_many(), Some(true));

        // identity family: countably many iff 4 <= m1 <= 8
        for m1 in 2..=12u32 {
            let mu = Scalar::from_int(m1 as i128 - 1);
            let r = check_suspension(m1, &mu).unwrap();
            assert!(r.satisfied, "identity suspension m1 = {m1}");
            assert_eq!(
                r.countably_many(),
                Some((4..=8).contains(&m1)),
                "countably_many at m1 = {m1}"
            );
        }
    }

    #[test]
    fn margin_flip_consistency() {
        // perturbing mu by +-eps flips a clause only near the threshold
        for m1 in 4..=10u32 {
            let base = (m1 as f64 - 3.0).powi(2) / 4.0;
            for delta in [-0.5, -0.01, 0.01, 0.5] {
                let mu = Scalar::Approx(base + delta);
                if mu.as_f64() <= 0.0 {
                    continue;
                }
                let r = check_suspension(m1, &mu).unwrap();
                let expect = delta > 0.0;
                // countably-many clause uses FLOAT_BAND for approx scalars
                if delta.abs() > 1e-9 {
                    assert_eq!(r.countably_many(), Some(expect), "m1={m1} delta={delta}");
                }
            }
        }
    }

    #[test]
    fn sweep_identity_square() {
        let mut pairs = Vec::new();
        for m1 in 2..=12 {
            for m2 in 2..=12 {
                pairs.push((
                    Eigenmap::identity(m1).unwrap(),
                    Eigenmap::identity(m2).unwrap(),
                ));
            }
        }
        let rows = sweep(&pairs);
        assert_eq!(rows.len(), 121);
        for r in &rows {
            assert!(r.d1.is_some() && r.d2.is_some());
            let expect = r.d1.as_ref().unwrap().satisfied && r.d2.as_ref().unwrap().satisfied;
            assert_eq!(r.satisfied, Some(expect));
        }
        assert!(sweep(&[]).is_empty());
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 122);
    }
}
