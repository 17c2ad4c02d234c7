//! Parametrizations of the varieties the engine is exercised on.
//!
//! All constructions live in the affine chart `x_0 = 1` of their source, so
//! points at infinity are not visited; every invariant computed downstream is
//! a generic-point invariant.
//!
//! Keys: `veronese:n`, `segre:a,b`, `bns:n,s`, `isoproj:KEY,eps,seed`,
//! `cone:KEY`, `segre_hyp:a,b`.

use std::fmt;

use serde::Serialize;

use crate::classify::{binomial2, m_of, ClassificationCase};
use crate::engine::{secant_dimension, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::field::{derive_seed, Field, Sampler};
use crate::linalg::Matrix;
use crate::poly::{MultiPoly, Parametrization};

/// How a catalog entry was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Veronese {
        n: usize,
    },
    Segre {
        a: usize,
        b: usize,
    },
    /// `B^n_s`: `v_2(P^n)` projected from the span of `v_2(P^s)`.
    InnerProjectionB {
        n: usize,
        s: usize,
    },
    IsoProjection {
        base: Box<Construction>,
        eps: usize,
        seed: u64,
    },
    Cone {
        base: Box<Construction>,
    },
    SegreHyperplaneSection {
        a: usize,
        b: usize,
    },
}

impl Construction {
    /// Canonical catalog key.
    pub fn key(&self) -> String {
        match self {
            Construction::Veronese { n } => format!("veronese:{n}"),
            Construction::Segre { a, b } => format!("segre:{a},{b}"),
            Construction::InnerProjectionB { n, s } => format!("bns:{n},{s}"),
            Construction::IsoProjection { base, eps, seed } => {
                format!("isoproj:{},{eps},{seed}", base.key())
            }
            Construction::Cone { base } => format!("cone:{}", base.key()),
            Construction::SegreHyperplaneSection { a, b } => format!("segre_hyp:{a},{b}"),
        }
    }

    /// Everything but cones is smooth (cones are singular at the vertex).
    pub fn is_smooth(&self) -> bool {
        match self {
            Construction::Cone { .. } => false,
            Construction::IsoProjection { base, .. } => base.is_smooth(),
            _ => true,
        }
    }

    /// The classification case this construction realizes, if any.
    pub fn intended_case(&self) -> Option<ClassificationCase> {
        match self {
            Construction::Veronese { n } => Some(ClassificationCase::Veronese { n: *n }),
            Construction::Segre { a, b } => Some(ClassificationCase::Segre { a: *a, b: *b }),
            Construction::InnerProjectionB { n, s } => {
                Some(ClassificationCase::InnerProjB { n: *n, s: *s })
            }
            Construction::SegreHyperplaneSection { a, b } => {
                Some(ClassificationCase::SegreHyperplaneSection { a: *a, b: *b })
            }
            Construction::IsoProjection { base, eps, .. } => match base.as_ref() {
                Construction::Veronese { n } => {
                    Some(ClassificationCase::IsoProjVeronese { n: *n, eps: *eps })
                }
                Construction::InnerProjectionB { n, s } => Some(ClassificationCase::IsoProjB {
                    n: *n,
                    s: *s,
                    eps: binomial2(s + 2) + eps,
                }),
                _ => None,
            },
            Construction::Cone { .. } => None,
        }
    }

    /// Known invariants, when the construction determines them.
    pub fn expected(&self) -> Option<Expected> {
        match self {
            Construction::Veronese { n } => Some(Expected {
                n: *n,
                ambient: m_of(*n),
                delta: Some(1),
                dim_ii: Some(m_of(n - 1) as i64),
                provenance: Provenance::Theorem,
            }),
            Construction::Segre { a, b } => Some(Expected {
                n: a + b,
                ambient: a * b + a + b,
                delta: Some(2),
                dim_ii: Some((a * b) as i64 - 1),
                provenance: if (*a, *b) == (2, 2) {
                    Provenance::Theorem
                } else {
                    Provenance::Oracle
                },
            }),
            Construction::InnerProjectionB { n, s } => {
                let ambient = m_of(*n) - binomial2(s + 2);
                let in_range = binomial2(s + 2) + 2 <= *n;
                Some(Expected {
                    n: *n,
                    ambient,
                    delta: in_range.then_some(1),
                    dim_ii: in_range.then_some(ambient as i64 - *n as i64 - 1),
                    provenance: Provenance::Theorem,
                })
            }
            Construction::IsoProjection { base, eps, .. } => base.expected().map(|e| Expected {
                ambient: e.ambient - eps,
                dim_ii: e
                    .dim_ii
                    .map(|_| e.ambient as i64 - *eps as i64 - e.n as i64 - 1),
                ..e
            }),
            Construction::Cone { base } => base.expected().map(|e| Expected {
                n: e.n + 1,
                ambient: e.ambient + 1,
                delta: e.delta.map(|d| d + 1),
                dim_ii: None,
                provenance: Provenance::Counting,
            }),
            Construction::SegreHyperplaneSection { a, b } => Some(Expected {
                n: a + b - 1,
                ambient: a * b + a + b - 1,
                delta: (*a <= 3 && *b <= 3).then_some(1),
                dim_ii: None,
                provenance: Provenance::Oracle,
            }),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A published theorem or example.
    Theorem,
    /// Elementary counting.
    Counting,
    /// An independent exact-rank computation.
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub n: usize,
    #[serde(rename = "N")]
    pub ambient: usize,
    pub delta: Option<usize>,
    #[serde(rename = "dim_II")]
    pub dim_ii: Option<i64>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub parametrization: Parametrization,
    pub construction: Construction,
    pub expected: Option<Expected>,
}

impl CatalogEntry {
    pub fn key(&self) -> String {
        self.construction.key()
    }
}

/// `(1, t_1, …, t_n)` in `n` variables.
fn homogeneous_vars(field: Field, n: usize) -> Vec<MultiPoly> {
    std::iter::once(MultiPoly::constant(n, field.one()))
        .chain((0..n).map(|i| MultiPoly::var(field, n, i)))
        .collect()
}

fn quadric_monomials(
    field: Field,
    n: usize,
    keep: impl Fn(usize, usize) -> bool,
) -> Vec<MultiPoly> {
    let h = homogeneous_vars(field, n);
    let mut out = Vec::new();
    for i in 0..=n {
        for j in i..=n {
            if keep(i, j) {
                out.push(h[i].mul(&h[j]));
            }
        }
    }
    out
}

/// `v_2(P^n) ⊂ P^{M(n)}`: all monomials of degree ≤ 2 in `t_1..t_n`.
pub fn veronese(field: Field, n: usize) -> Result<Parametrization> {
    if n < 1 {
        return Err(Error::InvalidArgument("veronese needs n >= 1".into()));
    }
    Parametrization::new(
        format!("veronese:{n}"),
        n,
        quadric_monomials(field, n, |_, _| true),
    )
}

/// `P^a × P^b ⊂ P^{ab+a+b}` with parameters `(u_1..u_a, v_1..v_b)`.
pub fn segre(field: Field, a: usize, b: usize) -> Result<Parametrization> {
    if a < 1 || b < 1 {
        return Err(Error::InvalidArgument("segre needs a, b >= 1".into()));
    }
    let k = a + b;
    let u: Vec<MultiPoly> = std::iter::once(MultiPoly::constant(k, field.one()))
        .chain((0..a).map(|i| MultiPoly::var(field, k, i)))
        .collect();
    let v: Vec<MultiPoly> = std::iter::once(MultiPoly::constant(k, field.one()))
        .chain((0..b).map(|j| MultiPoly::var(field, k, a + j)))
        .collect();
    let coords = u
        .iter()
        .flat_map(|x| v.iter().map(move |y| x.mul(y)))
        .collect();
    Parametrization::new(format!("segre:{a},{b}"), k, coords)
}

/// `B^n_s`: drops the monomials `x_i x_j` with `i, j ≤ s`, where `x_0` is the
/// homogenizing variable.
pub fn veronese_inner_projection(field: Field, n: usize, s: usize) -> Result<Parametrization> {
    if n < 2 || s > n - 2 {
        return Err(Error::InvalidArgument(format!(
            "bns needs 0 <= s <= n - 2, got n={n}, s={s}"
        )));
    }
    Parametrization::new(
        format!("bns:{n},{s}"),
        n,
        quadric_monomials(field, n, |_, j| j > s),
    )
}

/// Projects `phi` from a random center of dimension `eps - 1`.
///
/// `secant_dim` is `dim SX` from a prior analysis; the projection is rejected
/// unless the target `P^{N-eps}` still has room for `SX` as a proper
/// subvariety. The secant dimension is re-measured afterwards.
pub fn isomorphic_projection(
    phi: &Parametrization,
    eps: usize,
    seed: u64,
    secant_dim: usize,
) -> Result<Parametrization> {
    let ambient = phi.ambient_dim();
    if eps < 1 || eps + secant_dim >= ambient {
        return Err(Error::InvalidArgument(format!(
            "isomorphic projection needs 1 <= eps < N - dim SX = {}, got eps={eps}",
            ambient as i64 - secant_dim as i64
        )));
    }
    let mut sampler = Sampler::new(phi.field(), seed);
    let l = Matrix::random_full_rank(&mut sampler, ambient + 1 - eps, ambient + 1);
    let label = format!("isoproj:{},{eps},{seed}", phi.label());
    let projected = phi.compose_linear(&l)?.with_label(label);
    let got = secant_dimension(&projected, DEFAULT_TRIALS, &mut sampler)?;
    if got != secant_dim {
        return Err(Error::ProjectionHitSecant {
            expected: secant_dim,
            got,
        });
    }
    Ok(projected)
}

/// Cone with vertex `(0:…:0:1)`: one new parameter `λ` and coordinate `λ`.
pub fn cone(phi: &Parametrization) -> Result<Parametrization> {
    let field = phi.field();
    let k = phi.n_params() + 1;
    let lift: Vec<MultiPoly> = (0..k - 1).map(|i| MultiPoly::var(field, k, i)).collect();
    let mut coords = phi
        .coords()
        .iter()
        .map(|c| {
            if phi.n_params() == 0 {
                Ok(MultiPoly::constant(k, c.coefficient(&[])))
            } else {
                c.compose(&lift)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    coords.push(MultiPoly::var(field, k, k - 1));
    Parametrization::new(format!("cone:{}", phi.label()), k, coords)
}

/// Section of `P^a × P^b` by the trace hyperplane `Σ_{i ≤ min(a,b)} x_ii = 0`.
///
/// `v_0 = -Σ u_i v_i` solves the hyperplane equation. The coordinate
/// `x_00 = v_0` is then `-Σ x_ii` and is dropped, so the section is
/// nondegenerate in `P^{ab+a+b-1}`. The map has one-dimensional fibers
/// (scaling `v`), so it has `a + b` parameters for an `(a+b-1)`-fold.
pub fn segre_hyperplane_section(field: Field, a: usize, b: usize) -> Result<Parametrization> {
    if a < 2 || b < 2 {
        return Err(Error::InvalidArgument("segre_hyp needs a, b >= 2".into()));
    }
    let k = a + b;
    let u: Vec<MultiPoly> = (0..a).map(|i| MultiPoly::var(field, k, i)).collect();
    let v: Vec<MultiPoly> = (0..b).map(|j| MultiPoly::var(field, k, a + j)).collect();
    let trace = (0..a.min(b)).fold(MultiPoly::zero(field, k), |acc, i| {
        acc.add(&u[i].mul(&v[i]))
    });
    let v0 = trace.scale(&-field.one());
    let ubar: Vec<MultiPoly> = std::iter::once(MultiPoly::constant(k, field.one()))
        .chain(u)
        .collect();
    let vbar: Vec<MultiPoly> = std::iter::once(v0).chain(v).collect();
    let coords: Vec<MultiPoly> = ubar
        .iter()
        .flat_map(|x| vbar.iter().map(move |y| x.mul(y)))
        .skip(1)
        .collect();
    Parametrization::new(format!("segre_hyp:{a},{b}"), k, coords)
}

fn parse_usize(s: &str, key: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::UnknownVariety(key.to_string()))
}

fn parse_pair(args: &str, key: &str) -> Result<(usize, usize)> {
    let (x, y) = args
        .split_once(',')
        .ok_or_else(|| Error::UnknownVariety(key.to_string()))?;
    Ok((parse_usize(x, key)?, parse_usize(y, key)?))
}

/// Parses a catalog key into a construction (no parameter validation).
pub fn parse_key(key: &str) -> Result<Construction> {
    let unknown = || Error::UnknownVariety(key.to_string());
    let (kind, args) = key.split_once(':').ok_or_else(unknown)?;
    Ok(match kind {
        "veronese" => Construction::Veronese {
            n: parse_usize(args, key)?,
        },
        "segre" => {
            let (a, b) = parse_pair(args, key)?;
            Construction::Segre { a, b }
        }
        "bns" => {
            let (n, s) = parse_pair(args, key)?;
            Construction::InnerProjectionB { n, s }
        }
        "segre_hyp" => {
            let (a, b) = parse_pair(args, key)?;
            Construction::SegreHyperplaneSection { a, b }
        }
        "cone" => Construction::Cone {
            base: Box::new(parse_key(args)?),
        },
        "isoproj" => {
            let mut parts = args.rsplitn(3, ',');
            let seed = parts.next().ok_or_else(unknown)?;
            let eps = parts.next().ok_or_else(unknown)?;
            let base = parts.next().ok_or_else(unknown)?;
            Construction::IsoProjection {
                base: Box::new(parse_key(base)?),
                eps: parse_usize(eps, key)?,
                seed: seed.trim().parse().map_err(|_| unknown())?,
            }
        }
        _ => return Err(unknown()),
    })
}

/// Builds the parametrization of a construction.
pub fn realize(construction: &Construction, field: Field) -> Result<Parametrization> {
    match construction {
        Construction::Veronese { n } => veronese(field, *n),
        Construction::Segre { a, b } => segre(field, *a, *b),
        Construction::InnerProjectionB { n, s } => veronese_inner_projection(field, *n, *s),
        Construction::SegreHyperplaneSection { a, b } => segre_hyperplane_section(field, *a, *b),
        Construction::Cone { base } => cone(&realize(base, field)?),
        Construction::IsoProjection { base, eps, seed } => {
            let phi = realize(base, field)?;
            let mut sampler = Sampler::new(field, derive_seed(*seed, &base.key()));
            let dim_sx = secant_dimension(&phi, DEFAULT_TRIALS, &mut sampler)?;
            isomorphic_projection(&phi, *eps, *seed, dim_sx)
        }
    }
}

/// Parses and realizes a key.
pub fn build(key: &str, field: Field) -> Result<CatalogEntry> {
    let construction = parse_key(key)?;
    let parametrization = realize(&construction, field)?.with_label(construction.key());
    let expected = construction.expected();
    Ok(CatalogEntry {
        parametrization,
        construction,
        expected,
    })
}

/// The entries listed by `list-catalog`.
pub fn standard_keys() -> Vec<String> {
    let mut keys: Vec<String> = (1..=8).map(|n| format!("veronese:{n}")).collect();
    for a in 1..=4 {
        for b in a..=4 {
            keys.push(format!("segre:{a},{b}"));
        }
    }
    for n in 4..=7 {
        for s in (0..=n - 2).filter(|s| binomial2(s + 2) + 2 <= n) {
            keys.push(format!("bns:{n},{s}"));
        }
    }
    for n in 4..=6 {
        for eps in 1..=n - 2 {
            keys.push(format!("isoproj:veronese:{n},{eps},0"));
        }
    }
    keys.push("isoproj:bns:5,0,2,0".into());
    keys.push("cone:segre:2,2".into());
    keys.push("cone:veronese:2".into());
    keys.extend(["segre_hyp:2,2", "segre_hyp:2,3", "segre_hyp:3,3"].map(String::from));
    keys
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Scalar;

    fn gf() -> Field {
        Field::mersenne61()
    }

    #[test]
    fn veronese_counts() {
        let f = gf();
        assert_eq!(veronese(f, 2).unwrap().ambient_dim(), 5);
        assert_eq!(veronese(f, 5).unwrap().ambient_dim(), 20);
        for n in 1..=8 {
            assert_eq!(
                veronese(f, n).unwrap().coords().len(),
                (n + 2) * (n + 1) / 2
            );
        }
        let conic = veronese(f, 1).unwrap();
        let t = MultiPoly::var(f, 1, 0);
        assert_eq!(
            conic.coords(),
            &[MultiPoly::constant(1, f.one()), t.clone(), t.pow(2)]
        );
        assert!(veronese(f, 0).is_err());
    }

    #[test]
    fn veronese_coords_follow_graded_order() {
        let phi = veronese(gf(), 3).unwrap();
        let lead: Vec<_> = phi
            .coords()
            .iter()
            .map(|c| c.terms().next().unwrap().0.clone())
            .collect();
        let mut sorted = lead.clone();
        sorted.sort();
        assert_eq!(lead, sorted);
    }

    #[test]
    fn segre_counts() {
        let f = gf();
        let s = segre(f, 2, 2).unwrap();
        assert_eq!((s.ambient_dim(), s.n_params()), (8, 4));
        assert_eq!(segre(f, 1, 1).unwrap().ambient_dim(), 3);
        assert_eq!(segre(f, 3, 3).unwrap().ambient_dim(), 15);
        assert!(segre(f, 0, 2).is_err());
    }

    #[test]
    fn inner_projection_counts() {
        let f = gf();
        assert_eq!(
            veronese_inner_projection(f, 5, 0).unwrap().ambient_dim(),
            19
        );
        assert_eq!(
            veronese_inner_projection(f, 5, 1).unwrap().ambient_dim(),
            17
        );
        for n in 2..=8 {
            for s in 0..=n - 2 {
                let phi = veronese_inner_projection(f, n, s).unwrap();
                assert_eq!(phi.ambient_dim(), m_of(n) - (s + 1) * (s + 2) / 2);
            }
        }
        assert!(veronese_inner_projection(f, 5, 4).is_err());
    }

    #[test]
    fn hyperplane_section_counts() {
        let f = gf();
        let x = segre_hyperplane_section(f, 3, 3).unwrap();
        assert_eq!((x.ambient_dim(), x.n_params()), (14, 6));
        assert_eq!(segre_hyperplane_section(f, 2, 2).unwrap().ambient_dim(), 7);
        assert!(segre_hyperplane_section(f, 1, 3).is_err());
    }

    #[test]
    fn cone_over_point_is_a_line() {
        let f = gf();
        let point = Parametrization::new(
            "pt",
            0,
            vec![
                MultiPoly::constant(0, f.one()),
                MultiPoly::constant(0, f.from_i64(2)),
            ],
        )
        .unwrap();
        let line = cone(&point).unwrap();
        assert_eq!((line.n_params(), line.ambient_dim()), (1, 2));
        let z = cone(&segre(f, 2, 2).unwrap()).unwrap();
        assert_eq!((z.n_params(), z.ambient_dim()), (5, 9));
    }

    #[test]
    fn catalog_entries_are_nondegenerate() {
        let f = gf();
        for key in standard_keys() {
            let e = build(&key, f).unwrap();
            let phi = &e.parametrization;
            assert_eq!(
                phi.coefficient_matrix().rank(),
                phi.ambient_dim() + 1,
                "{key}"
            );
            if let Some(x) = e.expected {
                assert_eq!(x.ambient, phi.ambient_dim(), "{key}");
            }
        }
    }

    #[test]
    fn isomorphic_projection_preconditions() {
        let f = gf();
        let v4 = veronese(f, 4).unwrap();
        // N = 14, dim SX = 8: eps must be < 6
        assert!(isomorphic_projection(&v4, 0, 1, 8).is_err());
        assert!(isomorphic_projection(&v4, 6, 1, 8).is_err());
        let p = isomorphic_projection(&v4, 5, 1, 8).unwrap();
        assert_eq!(p.ambient_dim(), 9);
        // a lying caller: claimed dim SX larger than the truth is detected
        assert!(matches!(
            isomorphic_projection(&v4, 2, 1, 9),
            Err(Error::ProjectionHitSecant {
                expected: 9,
                got: 8
            })
        ));
    }

    #[test]
    fn keys_round_trip() {
        for key in standard_keys() {
            assert_eq!(parse_key(&key).unwrap().key(), key);
        }
        let nested = parse_key("isoproj:cone:segre:2,2,1,7").unwrap();
        assert_eq!(
            nested,
            Construction::IsoProjection {
                base: Box::new(Construction::Cone {
                    base: Box::new(Construction::Segre { a: 2, b: 2 })
                }),
                eps: 1,
                seed: 7
            }
        );
        for bad in [
            "",
            "veronese",
            "veronese:x",
            "segre:2",
            "torus:3",
            "isoproj:veronese:3",
        ] {
            assert!(
                matches!(parse_key(bad), Err(Error::UnknownVariety(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn intended_cases() {
        let c = parse_key("isoproj:bns:5,0,2,0").unwrap();
        assert_eq!(
            c.intended_case(),
            Some(ClassificationCase::IsoProjB { n: 5, s: 0, eps: 3 })
        );
        assert!(!parse_key("cone:segre:2,2").unwrap().is_smooth());
        assert!(parse_key("isoproj:veronese:4,1,0").unwrap().is_smooth());
    }

    #[test]
    fn rational_mode_builds() {
        let e = build("segre_hyp:2,2", Field::Rational).unwrap();
        let t0: Vec<Scalar> = (1..=4).map(|k| Field::Rational.from_i64(k)).collect();
        assert_eq!(e.parametrization.evaluate(&t0).unwrap().len(), 8);
    }
}
