//! Secant invariants via generic points and exact ranks.
//!
//! Every "general point" is a fresh uniform parameter vector. Ranks can only
//! drop at special points, so each quantity is the maximum observed over
//! `trials` draws. A draw that vanishes, or whose rank falls below the running
//! maximum, is redrawn up to [`MAX_RESAMPLES`] times before the stage fails
//! with [`Error::ResampleExhausted`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldConfig, Sampler, Scalar, GENERATOR};
use crate::linalg::Matrix;
use crate::poly::{hessian_pairs, AffineMap, Parametrization};

pub const DEFAULT_TRIALS: usize = 3;
pub const MAX_RESAMPLES: usize = 16;

/// `T_xX` at `φ(point)`: row 0 is `φ(point)`, row `i` is `∂φ/∂t_i(point)`.
#[derive(Clone, Debug)]
pub struct TangentFrame {
    pub point: Vec<Scalar>,
    pub rows: Matrix,
}

impl TangentFrame {
    pub fn rank(&self) -> usize {
        self.rows.rank()
    }
}

pub fn tangent_frame(phi: &Parametrization, t0: &[Scalar]) -> Result<TangentFrame> {
    let (value, jacobian) = phi.value_and_jacobian(t0)?;
    if value.iter().all(Scalar::is_zero) {
        return Err(Error::DegeneratePoint);
    }
    let value = Matrix::from_rows(phi.field(), value.len(), vec![value])?;
    Ok(TangentFrame {
        point: t0.to_vec(),
        rows: value.vstack(&jacobian)?,
    })
}

/// Runs `probe` `trials` times and returns the largest value, redrawing
/// points that are degenerate (`None`) or fall below the running maximum.
fn generic_max<F>(stage: &str, trials: usize, sampler: &mut Sampler, mut probe: F) -> Result<usize>
where
    F: FnMut(&mut Sampler) -> Result<Option<usize>>,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut best: Option<usize> = None;
    for _ in 0..trials {
        let mut attempts = 0;
        loop {
            attempts += 1;
            match probe(sampler)? {
                Some(v) if best.is_none_or(|b| v >= b) => {
                    best = Some(v);
                    break;
                }
                _ if attempts > MAX_RESAMPLES => {
                    return Err(Error::ResampleExhausted {
                        stage: stage.into(),
                        attempts,
                    });
                }
                _ => {}
            }
        }
    }
    Ok(best.expect("trials >= 1"))
}

fn frame_or_degenerate(phi: &Parametrization, t0: &[Scalar]) -> Result<Option<TangentFrame>> {
    match tangent_frame(phi, t0) {
        Ok(f) => Ok(Some(f)),
        Err(Error::DegeneratePoint) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Dimension of the closure of the image of `phi`.
pub fn variety_dimension(
    phi: &Parametrization,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<usize> {
    generic_max("variety dimension", trials, sampler, |s| {
        let t0 = s.random_vector(phi.n_params());
        Ok(frame_or_degenerate(phi, &t0)?.map(|f| f.rank() - 1))
    })
}

/// `dim SX` as the rank of two stacked tangent frames, minus one.
pub fn secant_dimension(
    phi: &Parametrization,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<usize> {
    generic_max("secant dimension", trials, sampler, |s| {
        let t0 = s.random_vector(phi.n_params());
        let t1 = s.random_vector(phi.n_params());
        let (Some(a), Some(b)) = (
            frame_or_degenerate(phi, &t0)?,
            frame_or_degenerate(phi, &t1)?,
        ) else {
            return Ok(None);
        };
        Ok(Some(a.rows.vstack(&b.rows)?.rank() - 1))
    })
}

/// `2n + 1 - dim SX`.
pub fn secant_defect(phi: &Parametrization, trials: usize, sampler: &mut Sampler) -> Result<usize> {
    let n = variety_dimension(phi, trials, sampler)?;
    let s = secant_dimension(phi, trials, sampler)?;
    Ok(2 * n + 1 - s)
}

/// Projection from `T_xX` at `x = φ(t0)`, landing in `P^{N-dim-1}`.
///
/// `dim` is the dimension of `X`; the frame at `t0` must have rank `dim + 1`.
pub fn tangential_projection(
    phi: &Parametrization,
    t0: &[Scalar],
    dim: usize,
) -> Result<Parametrization> {
    let frame = tangent_frame(phi, t0)?;
    let rank = frame.rank();
    if rank != dim + 1 {
        return Err(Error::ResampleExhausted {
            stage: format!(
                "tangential projection (frame rank {rank}, expected {})",
                dim + 1
            ),
            attempts: 1,
        });
    }
    let forms = frame.rows.kernel_basis();
    let label = format!("W_x({})", phi.label());
    Ok(phi.compose_linear(&forms)?.with_label(label))
}

/// `n_params - dim`: dimension of a general fiber of the parameter map.
pub fn generic_fiber_dimension(
    phi: &Parametrization,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<usize> {
    Ok(phi.n_params() - variety_dimension(phi, trials, sampler)?)
}

/// A random affine slice of the parameter space down to `m` parameters.
pub fn generic_slice(
    phi: &Parametrization,
    m: usize,
    sampler: &mut Sampler,
) -> Result<Parametrization> {
    let n = phi.n_params();
    let linear = Matrix::random_full_rank(sampler, n, m);
    let offset = sampler.random_vector(n);
    phi.substitute_affine(&AffineMap::new(linear, offset)?)
}

/// Slices `phi` to `dim` parameters when it has more, and checks the slice
/// still dominates the variety.
pub fn generically_finite(
    phi: &Parametrization,
    dim: usize,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<Parametrization> {
    if phi.n_params() == dim {
        return Ok(phi.clone());
    }
    for _ in 0..=MAX_RESAMPLES {
        let sliced = generic_slice(phi, dim, sampler)?;
        if variety_dimension(&sliced, trials, sampler)? == dim {
            return Ok(sliced);
        }
    }
    Err(Error::ResampleExhausted {
        stage: "generic slice".into(),
        attempts: MAX_RESAMPLES + 1,
    })
}

/// Second fundamental form `|II_x|` at `φ(t0)`.
#[derive(Clone, Debug)]
pub struct IIData {
    pub base_point: Vec<Scalar>,
    /// Projective dimension; `-1` for the empty system.
    pub dim_ii: i64,
    /// Independent quadrics as symmetric `n × n` matrices `M` with
    /// `q(v) = vᵀ M v`.
    pub quadrics: Vec<Matrix>,
}

impl IIData {
    /// Stacked quadric matrices; its kernel is the common kernel of `|II|`.
    pub fn stacked(&self, n: usize, field: Field) -> Matrix {
        self.quadrics
            .iter()
            .fold(Matrix::zeros(field, 0, n), |acc, q| {
                acc.vstack(q).expect("square quadrics")
            })
    }
}

/// Hessians of `phi` reduced modulo the tangent frame at `t0`.
///
/// Expects `phi` to be generically finite (`n_params = dim X`) with a frame
/// of full rank at `t0`.
pub fn second_fundamental_form(phi: &Parametrization, t0: &[Scalar]) -> Result<IIData> {
    let n = phi.n_params();
    let jet = phi.taylor2(t0)?;
    if jet.value.iter().all(Scalar::is_zero) {
        return Err(Error::DegeneratePoint);
    }
    let field = phi.field();
    let width = jet.value.len();
    let frame = Matrix::from_rows(field, width, vec![jet.value.clone()])?.vstack(&jet.jacobian)?;
    let frame_rank = frame.rank();
    if frame_rank != n + 1 {
        return Err(Error::ResampleExhausted {
            stage: format!(
                "second fundamental form (frame rank {frame_rank}, expected {})",
                n + 1
            ),
            attempts: 1,
        });
    }
    let residues = jet.hessians.reduce_modulo_rowspace(&frame)?;
    // Column c of the residues holds the upper triangle of the quadric cut by
    // the c-th functional vanishing on T_xX; independent quadrics = row basis
    // of the transpose.
    let basis = residues.transpose().row_basis();
    let pairs = hessian_pairs(n);
    let quadrics: Vec<Matrix> = basis
        .row_iter()
        .map(|v| {
            let mut m = Matrix::zeros(field, n, n);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                m.set(i, j, v[k].clone());
                m.set(j, i, v[k].clone());
            }
            m
        })
        .collect();
    Ok(IIData {
        base_point: t0.to_vec(),
        dim_ii: quadrics.len() as i64 - 1,
        quadrics,
    })
}

/// Generic `dim |II|` over `trials` points of a generically finite `phi`.
pub fn second_fundamental_form_dim(
    phi: &Parametrization,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<i64> {
    let r = generic_max("second fundamental form", trials, sampler, |s| {
        let t0 = s.random_vector(phi.n_params());
        match second_fundamental_form(phi, &t0) {
            Ok(ii) => Ok(Some(ii.quadrics.len())),
            Err(Error::DegeneratePoint | Error::ResampleExhausted { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    Ok(r as i64 - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GaussContact {
    pub dim: usize,
    /// The quadric system is empty: the variety is a linear space.
    pub linear: bool,
}

/// Dimension of the general contact locus of the Gauss map.
///
/// Slices `phi` to a generically finite presentation first. `0` means the
/// Gauss map is generically finite.
pub fn gauss_contact_dimension(
    phi: &Parametrization,
    trials: usize,
    sampler: &mut Sampler,
) -> Result<GaussContact> {
    let m = variety_dimension(phi, trials, sampler)?;
    let sliced = generically_finite(phi, m, trials, sampler)?;
    let field = phi.field();
    let mut empty = true;
    let rank = generic_max("gauss contact", trials, sampler, |s| {
        let t0 = s.random_vector(m);
        match second_fundamental_form(&sliced, &t0) {
            Ok(ii) => {
                if !ii.quadrics.is_empty() {
                    empty = false;
                }
                Ok(Some(ii.stacked(m, field).rank()))
            }
            Err(Error::DegeneratePoint | Error::ResampleExhausted { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    Ok(GaussContact {
        dim: m - rank,
        linear: empty,
    })
}

/// Analysis settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub field: FieldConfig,
    pub trials: usize,
}

impl AnalysisConfig {
    pub fn new(field: FieldConfig, trials: usize) -> Self {
        AnalysisConfig { field, trials }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.field.seed = seed;
        self
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            field: FieldConfig::default(),
            trials: DEFAULT_TRIALS,
        }
    }
}

/// All invariants of one variety.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecantReport {
    pub label: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub ambient: usize,
    #[serde(rename = "dim_SX")]
    pub dim_sx: usize,
    pub delta: usize,
    #[serde(rename = "dim_II")]
    pub dim_ii: i64,
    /// `None` when `SX = P^N` (tangential projection stages skipped).
    pub tangential_fiber_dim: Option<usize>,
    #[serde(rename = "W_dim")]
    pub tangential_image_dim: Option<usize>,
    #[serde(rename = "gauss_contact_dim_W")]
    pub gauss_contact_dim: Option<usize>,
    pub secant_fills_ambient: bool,
    pub trials: usize,
    pub mode: String,
    pub prime: Option<u64>,
    pub seed: u64,
    pub generator: String,
}

impl SecantReport {
    /// The integer invariants, without provenance metadata.
    pub fn invariants(
        &self,
    ) -> (
        usize,
        usize,
        usize,
        usize,
        i64,
        Option<usize>,
        Option<usize>,
    ) {
        (
            self.n,
            self.ambient,
            self.dim_sx,
            self.delta,
            self.dim_ii,
            self.tangential_fiber_dim,
            self.gauss_contact_dim,
        )
    }
}

fn staged<T>(stage: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::ResampleExhausted {
            stage: inner,
            attempts,
        } => Error::ResampleExhausted {
            stage: format!("{stage}: {inner}"),
            attempts,
        },
        other => other,
    })
}

/// Runs the whole pipeline. Deterministic given `(phi, config)`.
pub fn analyze(phi: &Parametrization, config: &AnalysisConfig) -> Result<SecantReport> {
    if config.field.field != phi.field() {
        return Err(Error::MixedField(
            config.field.field.to_string(),
            phi.field().to_string(),
        ));
    }
    let trials = config.trials;
    let mut sampler = config.field.sampler();
    let s = &mut sampler;

    let n = staged("dimension", variety_dimension(phi, trials, s))?;
    let ambient = phi.ambient_dim();
    let dim_sx = staged("secant", secant_dimension(phi, trials, s))?;
    debug_assert!(dim_sx <= ambient.min(2 * n + 1));
    let delta = 2 * n + 1 - dim_sx;

    let finite = staged("slice", generically_finite(phi, n, trials, s))?;
    let dim_ii = staged(
        "second fundamental form",
        second_fundamental_form_dim(&finite, trials, s),
    )?;

    let secant_fills_ambient = dim_sx >= ambient;
    let (mut fiber, mut w_dim, mut gauss) = (None, None, None);
    if !secant_fills_ambient {
        let w = staged(
            "tangential projection",
            project_at_generic_point(&finite, n, s),
        )?;
        let wd = staged("tangential image", variety_dimension(&w, trials, s))?;
        let contact = staged("gauss contact", gauss_contact_dimension(&w, trials, s))?;
        fiber = Some(n - wd);
        w_dim = Some(wd);
        gauss = Some(contact.dim);
    }

    Ok(SecantReport {
        label: phi.label().to_string(),
        n,
        ambient,
        dim_sx,
        delta,
        dim_ii,
        tangential_fiber_dim: fiber,
        tangential_image_dim: w_dim,
        gauss_contact_dim: gauss,
        secant_fills_ambient,
        trials,
        mode: config.field.field.mode().to_string(),
        prime: config.field.field.modulus(),
        seed: config.field.seed,
        generator: GENERATOR.to_string(),
    })
}

/// `π_x ∘ φ` at a random point whose frame has full rank `dim + 1`.
pub fn project_at_generic_point(
    phi: &Parametrization,
    dim: usize,
    sampler: &mut Sampler,
) -> Result<Parametrization> {
    for _ in 0..=MAX_RESAMPLES {
        let t0 = sampler.random_vector(phi.n_params());
        match tangential_projection(phi, &t0, dim) {
            Ok(w) => return Ok(w),
            Err(Error::DegeneratePoint | Error::ResampleExhausted { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResampleExhausted {
        stage: "tangential projection".into(),
        attempts: MAX_RESAMPLES + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    fn gf() -> Field {
        Field::mersenne61()
    }

    fn sampler() -> Sampler {
        Sampler::new(gf(), 5)
    }

    fn param(n: usize, coords: Vec<MultiPoly>) -> Parametrization {
        Parametrization::new("test", n, coords).unwrap()
    }

    fn t(f: Field, n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(f, n, i)
    }

    fn one(f: Field, n: usize) -> MultiPoly {
        MultiPoly::constant(n, f.one())
    }

    #[test]
    fn conic_frame_at_origin() {
        let f = gf();
        let phi = param(1, vec![one(f, 1), t(f, 1, 0), t(f, 1, 0).pow(2)]);
        let frame = tangent_frame(&phi, &[f.zero()]).unwrap();
        assert_eq!(
            frame.rows,
            Matrix::from_i64(f, &[&[1, 0, 0], &[0, 1, 0]]).unwrap()
        );
        assert_eq!(frame.rank() - 1, 1);
    }

    #[test]
    fn constant_map_is_a_point() {
        let f = gf();
        let phi = param(2, vec![one(f, 2), one(f, 2).scale(&f.from_i64(3))]);
        assert_eq!(variety_dimension(&phi, 3, &mut sampler()).unwrap(), 0);
        assert_eq!(tangent_frame(&phi, &[f.one(), f.one()]).unwrap().rank(), 1);
    }

    #[test]
    fn vanishing_point_is_degenerate() {
        let f = gf();
        let phi = param(1, vec![t(f, 1, 0), t(f, 1, 0).pow(2)]);
        assert!(matches!(
            tangent_frame(&phi, &[f.zero()]),
            Err(Error::DegeneratePoint)
        ));
    }

    #[test]
    fn resample_policy_fails_loudly() {
        let mut s = sampler();
        let err = generic_max("stage", 2, &mut s, |_| Ok(None)).unwrap_err();
        assert!(
            matches!(err, Error::ResampleExhausted { attempts, .. } if attempts == MAX_RESAMPLES + 1)
        );
        assert!(generic_max("stage", 0, &mut s, |_| Ok(Some(1))).is_err());
    }

    #[test]
    fn linear_space_has_empty_second_fundamental_form() {
        let f = gf();
        let n = 3;
        let mut coords = vec![one(f, n)];
        coords.extend((0..n).map(|i| t(f, n, i)));
        let phi = param(n, coords);
        let t0 = sampler().random_vector(n);
        let ii = second_fundamental_form(&phi, &t0).unwrap();
        assert_eq!(ii.dim_ii, -1);
        assert!(ii.quadrics.is_empty());
        assert_eq!(generic_fiber_dimension(&phi, 3, &mut sampler()).unwrap(), 0);
        let g = gauss_contact_dimension(&phi, 3, &mut sampler()).unwrap();
        assert_eq!(
            g,
            GaussContact {
                dim: 3,
                linear: true
            }
        );
    }

    #[test]
    fn cylinder_has_one_dimensional_contact() {
        let f = gf();
        let phi = param(
            2,
            vec![one(f, 2), t(f, 2, 0), t(f, 2, 0).pow(2), t(f, 2, 1)],
        );
        let g = gauss_contact_dimension(&phi, 3, &mut sampler()).unwrap();
        assert_eq!(
            g,
            GaussContact {
                dim: 1,
                linear: false
            }
        );
    }

    #[test]
    fn quadrics_are_symmetric_and_independent() {
        let f = gf();
        let n = 3;
        let h: Vec<MultiPoly> = std::iter::once(one(f, n))
            .chain((0..n).map(|i| t(f, n, i)))
            .collect();
        let mut coords = Vec::new();
        for i in 0..=n {
            for j in i..=n {
                coords.push(h[i].mul(&h[j]));
            }
        }
        let phi = param(n, coords);
        let t0 = sampler().random_vector(n);
        let ii = second_fundamental_form(&phi, &t0).unwrap();
        assert_eq!(ii.dim_ii, 5);
        for q in &ii.quadrics {
            assert_eq!(q, &q.transpose());
        }
        let flat: Vec<Vec<Scalar>> = ii
            .quadrics
            .iter()
            .map(|q| q.row_iter().flat_map(|r| r.to_vec()).collect())
            .collect();
        assert_eq!(
            Matrix::from_rows(f, n * n, flat).unwrap().rank(),
            ii.quadrics.len()
        );
    }

    #[test]
    fn analyze_rejects_mixed_field() {
        let f = gf();
        let phi = param(1, vec![one(f, 1), t(f, 1, 0)]);
        let cfg = AnalysisConfig::new(
            FieldConfig {
                field: Field::Rational,
                seed: 0,
            },
            3,
        );
        assert!(matches!(analyze(&phi, &cfg), Err(Error::MixedField(..))));
    }
}
