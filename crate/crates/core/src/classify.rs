//! Integer arithmetic of the extremal bounds and the near-extremal case list.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::engine::SecantReport;

/// `C(k, 2)`.
pub fn binomial2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// `M(n) = C(n+2, 2) - 1 = n(n+3)/2`, the ambient dimension of `v_2(P^n)`.
pub fn m_of(n: usize) -> usize {
    n * (n + 3) / 2
}

/// Upper bound on `N` for `dim SX ≤ 2n`. True when the bound holds or its
/// hypothesis fails.
pub fn zak_bound_check(n: usize, ambient: usize, dim_sx: usize) -> bool {
    dim_sx > 2 * n || ambient <= m_of(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaBounds {
    pub lo: usize,
    pub hi: usize,
}

impl DeltaBounds {
    pub fn contains(&self, delta: usize) -> bool {
        (self.lo..=self.hi).contains(&delta)
    }
}

/// Range for `δ` of a secant defective `n`-fold in `P^{M(n)-eps}`.
pub fn delta_bounds(n: usize, eps: usize) -> DeltaBounds {
    if eps + 2 <= n {
        DeltaBounds { lo: 1, hi: 1 }
    } else {
        DeltaBounds {
            lo: 1,
            hi: (eps + 2 - n).min(n / 2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ClassificationCase {
    Veronese {
        n: usize,
    },
    #[serde(rename = "isoproj_veronese")]
    IsoProjVeronese {
        n: usize,
        eps: usize,
    },
    #[serde(rename = "bns")]
    InnerProjB {
        n: usize,
        s: usize,
    },
    #[serde(rename = "isoproj_bns")]
    IsoProjB {
        n: usize,
        s: usize,
        eps: usize,
    },
    Segre {
        a: usize,
        b: usize,
    },
    #[serde(rename = "segre_hyp")]
    SegreHyperplaneSection {
        a: usize,
        b: usize,
    },
    PrimeFano,
    OutOfRange,
}

impl ClassificationCase {
    /// Stable name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            ClassificationCase::Veronese { .. } => "veronese",
            ClassificationCase::IsoProjVeronese { .. } => "isoproj_veronese",
            ClassificationCase::InnerProjB { .. } => "bns",
            ClassificationCase::IsoProjB { .. } => "isoproj_bns",
            ClassificationCase::Segre { .. } => "segre",
            ClassificationCase::SegreHyperplaneSection { .. } => "segre_hyp",
            ClassificationCase::PrimeFano => "prime_fano",
            ClassificationCase::OutOfRange => "out_of_range",
        }
    }

    /// Parameter constraints of the case list.
    pub fn is_well_formed(&self) -> bool {
        match *self {
            ClassificationCase::Veronese { n } => n >= 1,
            ClassificationCase::IsoProjVeronese { n, eps } => eps >= 1 && eps + 2 <= n,
            ClassificationCase::InnerProjB { n, s } => binomial2(s + 2) + 2 <= n,
            ClassificationCase::IsoProjB { n, s, eps } => binomial2(s + 2) < eps && eps + 2 <= n,
            ClassificationCase::Segre { a, b } => a >= 1 && b >= 1,
            ClassificationCase::SegreHyperplaneSection { a, b } => a >= 2 && b >= 2,
            ClassificationCase::PrimeFano | ClassificationCase::OutOfRange => true,
        }
    }

    /// `(n, N, δ)` implied by the case, if it pins them down.
    pub fn implied_invariants(&self) -> Option<(usize, usize, usize)> {
        match *self {
            ClassificationCase::Veronese { n } => Some((n, m_of(n), 1)),
            ClassificationCase::IsoProjVeronese { n, eps }
            | ClassificationCase::IsoProjB { n, eps, .. } => {
                Some((n, m_of(n).checked_sub(eps)?, 1))
            }
            ClassificationCase::InnerProjB { n, s } => {
                Some((n, m_of(n).checked_sub(binomial2(s + 2))?, 1))
            }
            ClassificationCase::Segre { a, b } => Some((a + b, a * b + a + b, 2)),
            ClassificationCase::SegreHyperplaneSection { a, b } => {
                Some(((a + b).checked_sub(1)?, a * b + a + b - 1, 1))
            }
            ClassificationCase::PrimeFano | ClassificationCase::OutOfRange => None,
        }
    }
}

impl fmt::Display for ClassificationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ClassificationCase::Veronese { n } => write!(f, "veronese({n})"),
            ClassificationCase::IsoProjVeronese { n, eps } => {
                write!(f, "isoproj_veronese({n},{eps})")
            }
            ClassificationCase::InnerProjB { n, s } => write!(f, "bns({n},{s})"),
            ClassificationCase::IsoProjB { n, s, eps } => write!(f, "isoproj_bns({n},{s},{eps})"),
            ClassificationCase::Segre { a, b } => write!(f, "segre({a},{b})"),
            ClassificationCase::SegreHyperplaneSection { a, b } => write!(f, "segre_hyp({a},{b})"),
            ClassificationCase::PrimeFano => f.write_str("prime_fano"),
            ClassificationCase::OutOfRange => f.write_str("out_of_range"),
        }
    }
}

/// Candidate cases for a secant defective `n`-fold in `P^N` with
/// `M(n) - (n-2) ≤ N ≤ M(n)`.
pub fn enumerate_cases(n: usize, ambient: usize) -> Vec<ClassificationCase> {
    use ClassificationCase::*;
    let m = m_of(n);
    if n < 2 || ambient > m || ambient + (n - 2) < m {
        return vec![OutOfRange];
    }
    let eps = m - ambient;
    if eps == 0 {
        return vec![Veronese { n }];
    }
    if n == 2 {
        return Vec::new();
    }
    let mut out = vec![IsoProjVeronese { n, eps }];
    let centers = (0..).take_while(|&s| binomial2(s + 2) <= eps);
    out.extend(
        centers
            .clone()
            .filter(|&s| binomial2(s + 2) == eps)
            .map(|s| InnerProjB { n, s }),
    );
    out.extend(
        centers
            .filter(|&s| binomial2(s + 2) < eps)
            .map(|s| IsoProjB { n, s, eps }),
    );
    out
}

/// Confirms that no integer dimension fits strictly above the span bound of
/// the line locus and at most `n - 3`. A line locus of dimension `(n-3)/2`
/// only exists for odd `n`, so even `n` holds trivially.
pub fn prime_fano_exclusion_check(n: usize) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return true;
    }
    let k = (n - 3) / 2;
    let lower = binomial2(k + 2) as i64 - 1;
    let upper = n as i64 - 3;
    // some ε in [1, n-2] and dim d with lower < d ≤ ε - 1 ≤ upper
    !(1..=n as i64 - 2).any(|eps| lower < eps - 1 && eps - 1 <= upper)
}

/// Whether the report's `(n, N, δ)` agree with the case.
pub fn consistency_check(report: &SecantReport, case: &ClassificationCase) -> bool {
    case.implied_invariants() == Some((report.n, report.ambient, report.delta))
}

/// Outcome of a theorem check on one report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail,
    /// Hypotheses not met; nothing asserted.
    Vacuous,
}

impl Check {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }

    fn gated(applies: bool, ok: impl FnOnce() -> bool) -> Self {
        if applies {
            Check::from_bool(ok())
        } else {
            Check::Vacuous
        }
    }

    pub fn holds(self) -> bool {
        self != Check::Fail
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Pass => "pass",
            Check::Fail => "FAIL",
            Check::Vacuous => "vacuous",
        })
    }
}

impl Serialize for Check {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_bool(self.holds())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremChecks {
    pub zak: Check,
    pub delta_bounds: Check,
    #[serde(rename = "prop_IR")]
    pub prop_ir: Check,
    pub fiber_law: Check,
    pub gauss_finite: Check,
}

impl TheoremChecks {
    pub fn entries(&self) -> [(&'static str, Check); 5] {
        [
            ("zak", self.zak),
            ("delta_bounds", self.delta_bounds),
            ("prop_IR", self.prop_ir),
            ("fiber_law", self.fiber_law),
            ("gauss_finite", self.gauss_finite),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.entries().iter().all(|(_, c)| c.holds())
    }

    pub fn vacuous(&self) -> Vec<&'static str> {
        self.entries()
            .iter()
            .filter(|(_, c)| *c == Check::Vacuous)
            .map(|(k, _)| *k)
            .collect()
    }
}

/// Evaluates the bound, second fundamental form, tangential fiber and Gauss
/// statements on a report. `smooth` is known from the construction.
pub fn evaluate_checks(report: &SecantReport, smooth: bool) -> TheoremChecks {
    let (n, ambient, delta) = (report.n, report.ambient, report.delta);
    let proper = !report.secant_fills_ambient;
    let defective = delta >= 1 && proper;
    let eps = m_of(n) as i64 - ambient as i64;
    let full = smooth && n >= 2 && defective && eps >= 0;

    TheoremChecks {
        zak: Check::gated(n >= 2, || zak_bound_check(n, ambient, report.dim_sx)),
        delta_bounds: Check::gated(full, || delta_bounds(n, eps as usize).contains(delta)),
        prop_ir: Check::gated(defective, || report.dim_ii == ambient as i64 - n as i64 - 1),
        fiber_law: Check::gated(proper, || report.tangential_fiber_dim == Some(delta)),
        gauss_finite: Check::gated(full && eps + 2 <= n as i64, || {
            report.gauss_contact_dim == Some(0)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassificationCase::*;

    #[test]
    fn m_values() {
        assert_eq!(m_of(2), 5);
        assert_eq!(m_of(5), 20);
        assert_eq!(m_of(3), 9);
        for n in 1..30 {
            assert_eq!(m_of(n), binomial2(n + 2) - 1);
        }
    }

    #[test]
    fn zak_examples() {
        assert!(zak_bound_check(5, 20, 10));
        assert!(!zak_bound_check(5, 21, 10));
        assert!(zak_bound_check(4, 30, 9));
    }

    #[test]
    fn delta_bound_examples() {
        assert_eq!(delta_bounds(5, 3), DeltaBounds { lo: 1, hi: 1 });
        assert_eq!(delta_bounds(6, 7), DeltaBounds { lo: 1, hi: 3 });
        assert_eq!(delta_bounds(4, 3), DeltaBounds { lo: 1, hi: 1 });
        for n in 3..=12 {
            for eps in 0..=n - 2 {
                assert_eq!(delta_bounds(n, eps), DeltaBounds { lo: 1, hi: 1 });
            }
        }
    }

    #[test]
    fn case_tables_for_five_folds() {
        assert_eq!(enumerate_cases(5, 20), vec![Veronese { n: 5 }]);
        assert_eq!(
            enumerate_cases(5, 19),
            vec![IsoProjVeronese { n: 5, eps: 1 }, InnerProjB { n: 5, s: 0 }]
        );
        assert_eq!(
            enumerate_cases(5, 18),
            vec![
                IsoProjVeronese { n: 5, eps: 2 },
                IsoProjB { n: 5, s: 0, eps: 2 }
            ]
        );
        assert_eq!(
            enumerate_cases(5, 17),
            vec![
                IsoProjVeronese { n: 5, eps: 3 },
                InnerProjB { n: 5, s: 1 },
                IsoProjB { n: 5, s: 0, eps: 3 }
            ]
        );
        assert_eq!(enumerate_cases(5, 16), vec![OutOfRange]);
        assert_eq!(enumerate_cases(5, 21), vec![OutOfRange]);
        assert_eq!(enumerate_cases(2, 5), vec![Veronese { n: 2 }]);
        assert_eq!(enumerate_cases(1, 2), vec![OutOfRange]);
    }

    #[test]
    fn enumerated_cases_are_well_formed() {
        for n in 2..=12 {
            assert_eq!(enumerate_cases(n, m_of(n)), vec![Veronese { n }]);
            for ambient in m_of(n) - (n - 2)..=m_of(n) {
                for c in enumerate_cases(n, ambient) {
                    assert!(c.is_well_formed(), "{c}");
                    assert_eq!(
                        c.implied_invariants().map(|(a, b, _)| (a, b)),
                        Some((n, ambient)),
                        "{c}"
                    );
                }
            }
        }
    }

    #[test]
    fn prime_fano_is_excluded() {
        assert!(prime_fano_exclusion_check(5));
        assert!(prime_fano_exclusion_check(3));
        assert!(prime_fano_exclusion_check(9));
        for n in 3..200 {
            assert!(prime_fano_exclusion_check(n), "{n}");
        }
    }

    #[test]
    fn case_names_serialize_stably() {
        let v = serde_json::to_value(IsoProjB { n: 5, s: 0, eps: 3 }).unwrap();
        assert_eq!(v["case"], "isoproj_bns");
        for c in [
            Veronese { n: 2 },
            IsoProjVeronese { n: 4, eps: 1 },
            InnerProjB { n: 4, s: 0 },
            Segre { a: 2, b: 2 },
            SegreHyperplaneSection { a: 2, b: 2 },
            PrimeFano,
            OutOfRange,
        ] {
            assert_eq!(serde_json::to_value(c).unwrap()["case"], c.name());
        }
    }
}
