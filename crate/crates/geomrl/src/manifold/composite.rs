//! Product manifolds: ordered lists of sphere, SPD, and Euclidean factors.
//!
//! Tangent vectors over a product are stored flat, as the concatenation of
//! per-factor coordinates: 4 ambient coordinates per sphere factor,
//! `d(d+1)/2` Mandel coordinates per SPD factor, and `n` plain coordinates
//! per Euclidean factor. Factors are always processed in declaration order.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::manifold::quaternion::{TangentS3, UnitQuaternion};
use crate::manifold::spd::{mandel_unvec, mandel_vec, SpdMatrix, SpdTangent};

/// The kind and size of one factor of a product manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    S3,
    Spd(usize),
    Euclid(usize),
}

impl FactorKind {
    /// Length of this factor's segment in a flat tangent vector.
    pub fn tangent_dim(&self) -> usize {
        match self {
            FactorKind::S3 => 4,
            FactorKind::Spd(d) => d * (d + 1) / 2,
            FactorKind::Euclid(n) => *n,
        }
    }
}

/// One factor of a composite point.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    S3(UnitQuaternion),
    Spd(SpdMatrix),
    Euclid(DVector<f64>),
}

impl Factor {
    pub fn kind(&self) -> FactorKind {
        match self {
            Factor::S3(_) => FactorKind::S3,
            Factor::Spd(m) => FactorKind::Spd(m.dim()),
            Factor::Euclid(v) => FactorKind::Euclid(v.len()),
        }
    }

    /// The conventional base point of this factor's kind: identity quaternion,
    /// identity matrix, or the zero vector.
    pub fn default_base(kind: FactorKind) -> Factor {
        match kind {
            FactorKind::S3 => Factor::S3(UnitQuaternion::identity()),
            FactorKind::Spd(d) => Factor::Spd(SpdMatrix::identity(d)),
            FactorKind::Euclid(n) => Factor::Euclid(DVector::zeros(n)),
        }
    }
}

/// A point on a product manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositePoint {
    factors: Vec<Factor>,
}

/// A tangent vector over a product manifold, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeTangent {
    kinds: Vec<FactorKind>,
    flat: DVector<f64>,
}

fn check_same_kinds(a: &[FactorKind], b: &[FactorKind], context: &str) -> Result<(), Error> {
    if a != b {
        return Err(Error::kind_mismatch(format!(
            "{context}: {a:?} vs {b:?}"
        )));
    }
    Ok(())
}

impl CompositePoint {
    pub fn new(factors: Vec<Factor>) -> Self {
        CompositePoint { factors }
    }

    /// A point made of the default base of each kind.
    pub fn default_bases(kinds: &[FactorKind]) -> Self {
        CompositePoint {
            factors: kinds.iter().map(|k| Factor::default_base(*k)).collect(),
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn kinds(&self) -> Vec<FactorKind> {
        self.factors.iter().map(Factor::kind).collect()
    }

    pub fn tangent_dim(&self) -> usize {
        self.factors.iter().map(|f| f.kind().tangent_dim()).sum()
    }

    /// Factor-wise logarithmic map into the tangent space at `self`.
    pub fn log(&self, target: &CompositePoint) -> Result<CompositeTangent, Error> {
        check_same_kinds(&self.kinds(), &target.kinds(), "log")?;
        let mut segments = Vec::with_capacity(self.factors.len());
        for (a, b) in self.factors.iter().zip(target.factors.iter()) {
            match (a, b) {
                (Factor::S3(qa), Factor::S3(qb)) => segments.push(s3_to_flat(&qa.log_map(qb)?)),
                (Factor::Spd(pa), Factor::Spd(pb)) => {
                    segments.push(mandel_vec(pa.log_map(pb)?.matrix()))
                }
                (Factor::Euclid(va), Factor::Euclid(vb)) => segments.push(vb - va),
                _ => unreachable!("kinds checked above"),
            }
        }
        Ok(CompositeTangent::from_segments(self.kinds(), &segments))
    }

    /// Factor-wise exponential map of a tangent at `self`.
    pub fn exp(&self, tangent: &CompositeTangent) -> Result<CompositePoint, Error> {
        check_same_kinds(&self.kinds(), &tangent.kinds, "exp")?;
        let mut factors = Vec::with_capacity(self.factors.len());
        for (i, f) in self.factors.iter().enumerate() {
            let seg = tangent.segment(i);
            match f {
                Factor::S3(q) => factors.push(Factor::S3(q.exp_map(&flat_to_s3(&seg)))),
                Factor::Spd(p) => {
                    let t = SpdTangent::new(mandel_unvec(&seg)?)?;
                    factors.push(Factor::Spd(p.exp_map(&t)));
                }
                Factor::Euclid(v) => factors.push(Factor::Euclid(v + seg)),
            }
        }
        Ok(CompositePoint { factors })
    }

    /// Factor-wise parallel transport of `tangent` from `self` to `to`.
    /// Euclidean segments pass through unchanged.
    pub fn transport(
        &self,
        to: &CompositePoint,
        tangent: &CompositeTangent,
    ) -> Result<CompositeTangent, Error> {
        check_same_kinds(&self.kinds(), &to.kinds(), "transport")?;
        check_same_kinds(&self.kinds(), &tangent.kinds, "transport tangent")?;
        let mut segments = Vec::with_capacity(self.factors.len());
        for (i, (a, b)) in self.factors.iter().zip(to.factors.iter()).enumerate() {
            let seg = tangent.segment(i);
            match (a, b) {
                (Factor::S3(qa), Factor::S3(qb)) => {
                    let moved = qa.parallel_transport(qb, &flat_to_s3(&seg))?;
                    segments.push(s3_to_flat(&moved));
                }
                (Factor::Spd(pa), Factor::Spd(pb)) => {
                    let t = SpdTangent::new(mandel_unvec(&seg)?)?;
                    segments.push(mandel_vec(pa.parallel_transport(pb, &t).matrix()));
                }
                (Factor::Euclid(_), Factor::Euclid(_)) => segments.push(seg),
                _ => unreachable!("kinds checked above"),
            }
        }
        Ok(CompositeTangent::from_segments(self.kinds(), &segments))
    }
}

fn s3_to_flat(t: &TangentS3) -> DVector<f64> {
    DVector::from_row_slice(t.0.as_slice())
}

fn flat_to_s3(seg: &DVector<f64>) -> TangentS3 {
    TangentS3(nalgebra::Vector4::new(seg[0], seg[1], seg[2], seg[3]))
}

impl CompositeTangent {
    pub fn zeros(kinds: Vec<FactorKind>) -> Self {
        let dim = kinds.iter().map(FactorKind::tangent_dim).sum();
        CompositeTangent {
            kinds,
            flat: DVector::zeros(dim),
        }
    }

    /// Wraps a flat coordinate vector; its length must match the kinds.
    pub fn from_flat(kinds: Vec<FactorKind>, flat: DVector<f64>) -> Result<Self, Error> {
        let expected: usize = kinds.iter().map(FactorKind::tangent_dim).sum();
        if flat.len() != expected {
            return Err(Error::BadLength {
                expected,
                got: flat.len(),
            });
        }
        Ok(CompositeTangent { kinds, flat })
    }

    fn from_segments(kinds: Vec<FactorKind>, segments: &[DVector<f64>]) -> Self {
        let dim = kinds.iter().map(FactorKind::tangent_dim).sum();
        let mut flat = DVector::zeros(dim);
        let mut offset = 0;
        for seg in segments {
            flat.rows_mut(offset, seg.len()).copy_from(seg);
            offset += seg.len();
        }
        CompositeTangent { kinds, flat }
    }

    pub fn kinds(&self) -> &[FactorKind] {
        &self.kinds
    }

    pub fn flat(&self) -> &DVector<f64> {
        &self.flat
    }

    pub fn norm(&self) -> f64 {
        self.flat.norm()
    }

    fn segment_bounds(&self, index: usize) -> (usize, usize) {
        let offset = self.kinds[..index]
            .iter()
            .map(FactorKind::tangent_dim)
            .sum();
        (offset, self.kinds[index].tangent_dim())
    }

    /// The flat coordinates of factor `index`.
    pub fn segment(&self, index: usize) -> DVector<f64> {
        let (offset, len) = self.segment_bounds(index);
        self.flat.rows(offset, len).into_owned()
    }

    pub fn set_segment(&mut self, index: usize, seg: &DVector<f64>) {
        let (offset, len) = self.segment_bounds(index);
        assert_eq!(seg.len(), len);
        self.flat.rows_mut(offset, len).copy_from(seg);
    }

    /// Interprets an SPD factor's segment as a symmetric matrix.
    pub fn spd_segment(&self, index: usize) -> Result<SpdTangent, Error> {
        SpdTangent::new(mandel_unvec(&self.segment(index))?)
    }

    /// Interprets a sphere factor's segment as an ambient tangent vector.
    pub fn s3_segment(&self, index: usize) -> TangentS3 {
        flat_to_s3(&self.segment(index))
    }
}

/// Used by tests and the Gaussian density below.
pub(crate) fn gaussian_dim_check(
    cov: &DMatrix<f64>,
    tangent_dim: usize,
) -> Result<(), Error> {
    if cov.nrows() != tangent_dim || cov.ncols() != tangent_dim {
        return Err(Error::dimension_mismatch(format!(
            "covariance is {}x{}, tangent dimension is {tangent_dim}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    Ok(())
}
