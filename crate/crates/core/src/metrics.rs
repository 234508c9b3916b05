//! Distances between examples and prototypes, cluster dispersion, and the
//! relative-error quality measure.
//!
//! Examples are projected onto the distance dimensions as `Option<f64>`
//! coordinates (missing cells become `None`). A distance only looks at the
//! dimensions defined in both operands and scales the squared sum by
//! `|dims| / |defined|` so partially observed examples stay comparable.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, Example};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Normalization {
    #[default]
    None,
    MinMax,
    ZScore,
}

/// Which attributes enter the distance and how they are weighted. Turned
/// into a usable [`Metric`] by freezing normalization statistics on a
/// training set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceSpec {
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    pub norm: Normalization,
}

impl DistanceSpec {
    pub fn new(dims: Vec<usize>, weights: Option<Vec<f64>>, norm: Normalization) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("distance needs at least one dimension".into()));
        }
        let weights = weights.unwrap_or_else(|| vec![1.0; dims.len()]);
        if weights.len() != dims.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights given for {} distance dimensions",
                weights.len(),
                dims.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::InvalidArgument(format!("distance weight {w} is not positive")));
        }
        for (i, d) in dims.iter().enumerate() {
            if dims[..i].contains(d) {
                return Err(Error::InvalidArgument(format!("distance dimension {d} listed twice")));
            }
        }
        Ok(Self { dims, weights, norm })
    }

    /// Unit weights, no normalization.
    pub fn plain(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, None, Normalization::None)
    }

    /// Freezes normalization statistics on `ids` of `ds`.
    pub fn freeze(&self, ds: &Dataset, ids: &[usize]) -> Result<Metric> {
        for &d in &self.dims {
            match ds.schema().get(d) {
                Some(a) if a.is_numeric() => {}
                Some(a) => {
                    return Err(Error::InvalidArgument(format!(
                        "distance dimension `{}` is not numeric (encode nominals first)",
                        a.name
                    )))
                }
                None => return Err(Error::InvalidArgument(format!("distance dimension {d} out of range"))),
            }
        }
        let scales = self
            .dims
            .iter()
            .map(|&d| {
                let values: Vec<f64> = ids.iter().filter_map(|&i| ds.value(i, d).as_f64()).collect();
                let scale = match self.norm {
                    Normalization::None => 1.0,
                    _ if values.is_empty() => 1.0,
                    Normalization::MinMax => {
                        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        hi - lo
                    }
                    Normalization::ZScore => {
                        let n = values.len() as f64;
                        let mean = values.iter().sum::<f64>() / n;
                        libm::sqrt(values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n)
                    }
                };
                if scale > 0.0 && scale.is_finite() {
                    scale
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Metric { spec: self.clone(), scales })
    }
}

/// A [`DistanceSpec`] with frozen per-dimension scales.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metric {
    spec: DistanceSpec,
    scales: Vec<f64>,
}

impl Metric {
    pub fn spec(&self) -> &DistanceSpec {
        &self.spec
    }

    pub fn dims(&self) -> &[usize] {
        &self.spec.dims
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Same metric with every weight multiplied by `c`.
    pub fn reweighted(&self, c: f64) -> Metric {
        let mut m = self.clone();
        m.spec.weights.iter_mut().for_each(|w| *w *= c);
        m
    }

    /// Coordinates of `e` on the distance dimensions (raw, unscaled).
    pub fn project(&self, e: &Example) -> Vec<Option<f64>> {
        self.spec.dims.iter().map(|&d| e.value(d).as_f64()).collect()
    }

    /// Squared distance, or `None` when no dimension is defined in both.
    pub fn squared(&self, a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
        let mut sum = 0.0;
        let mut defined = 0usize;
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            if let (Some(x), Some(y)) = (x, y) {
                let diff = (x - y) / self.scales[k];
                sum += self.spec.weights[k] * diff * diff;
                defined += 1;
            }
        }
        if defined == 0 {
            return None;
        }
        if defined == self.spec.dims.len() {
            Some(sum)
        } else {
            Some(sum * self.spec.dims.len() as f64 / defined as f64)
        }
    }

    pub fn distance(&self, a: &[Option<f64>], b: &[Option<f64>]) -> Result<f64> {
        self.squared(a, b).map(libm::sqrt).ok_or(Error::DistanceUndefined)
    }

    pub fn example_distance(&self, a: &Example, b: &Example) -> Result<f64> {
        self.distance(&self.project(a), &self.project(b))
    }
}

/// Per-dimension mean of a cluster. A dimension with no observed value has
/// no mean (`None`) and zero support.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prototype {
    pub mean: Vec<Option<f64>>,
    pub support: Vec<usize>,
}

impl Prototype {
    pub fn coords(&self) -> &[Option<f64>] {
        &self.mean
    }

    /// Weighted mean of projected points.
    pub fn of_points<'a>(dims: usize, points: impl IntoIterator<Item = (&'a [Option<f64>], f64)>) -> Result<Self> {
        let mut sum = vec![0.0; dims];
        let mut wsum = vec![0.0; dims];
        let mut support = vec![0usize; dims];
        let mut count = 0usize;
        for (p, w) in points {
            count += 1;
            for (k, v) in p.iter().enumerate() {
                if let Some(v) = v {
                    sum[k] += w * v;
                    wsum[k] += w;
                    support[k] += 1;
                }
            }
        }
        if count == 0 {
            return Err(Error::EmptyCluster);
        }
        let mean = sum.iter().zip(&wsum).map(|(s, w)| (*w > 0.0).then(|| s / w)).collect();
        Ok(Prototype { mean, support })
    }
}

pub fn prototype(metric: &Metric, ds: &Dataset, cluster: &[usize]) -> Result<Prototype> {
    let points: Vec<_> = cluster.iter().map(|&i| (metric.project(ds.example(i)), ds.example(i).weight())).collect();
    Prototype::of_points(metric.dims().len(), points.iter().map(|(p, w)| (p.as_slice(), *w)))
}

pub fn cluster_distance(metric: &Metric, ds: &Dataset, c1: &[usize], c2: &[usize]) -> Result<f64> {
    let p1 = prototype(metric, ds, c1)?;
    let p2 = prototype(metric, ds, c2)?;
    metric.distance(p1.coords(), p2.coords())
}

/// Weighted sum of squared distances of the members to the cluster mean.
/// Fails if any member shares no defined dimension with the prototype.
pub fn sum_squares(metric: &Metric, ds: &Dataset, cluster: &[usize]) -> Result<f64> {
    let p = prototype(metric, ds, cluster)?;
    cluster.iter().try_fold(0.0, |acc, &i| {
        let e = ds.example(i);
        let d2 = metric.squared(&metric.project(e), p.coords()).ok_or(Error::DistanceUndefined)?;
        Ok(acc + e.weight() * d2)
    })
}

/// Like [`sum_squares`] over projected points, but members without any
/// distance to the prototype contribute nothing.
pub(crate) fn dispersion(metric: &Metric, points: &[&[Option<f64>]], weights: &[f64], p: &Prototype) -> f64 {
    points.iter().zip(weights).filter_map(|(x, w)| metric.squared(x, p.coords()).map(|d2| w * d2)).sum()
}

/// `Σ d(eᵢ, êᵢ)² / Σ d(eᵢ, p)²`. Pairs whose prediction or baseline distance
/// is undefined are left out of both sums. `0/0` is defined as 0.
pub fn relative_error(
    metric: &Metric,
    actuals: &[Vec<Option<f64>>],
    predictions: &[&Prototype],
    baseline: &Prototype,
) -> Result<f64> {
    if actuals.is_empty() || actuals.len() != predictions.len() {
        return Err(Error::InvalidArgument(format!("{} actuals for {} predictions", actuals.len(), predictions.len())));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, p) in actuals.iter().zip(predictions) {
        if let (Some(e), Some(b)) = (metric.squared(a, p.coords()), metric.squared(a, baseline.coords())) {
            num += e;
            den += b;
        }
    }
    if den == 0.0 {
        return if num == 0.0 { Ok(0.0) } else { Err(Error::RelativeErrorUndefined) };
    }
    Ok(num / den)
}

/// Sufficient statistics of a binary split.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitStatistics {
    pub n: usize,
    pub n_left: usize,
    pub n_right: usize,
    /// Members with at least one distance dimension defined, the ones that
    /// contribute to `ss`. Equals `n` on complete data; the F-test uses it.
    pub n_defined: usize,
    pub ss: f64,
    pub ss_left: f64,
    pub ss_right: f64,
    /// F statistic; `+inf` for a perfect split.
    #[cfg_attr(feature = "serde", serde(with = "crate::metrics::extended_f64"))]
    pub f: f64,
    pub proto_left: Prototype,
    pub proto_right: Prototype,
    pub inter_distance: f64,
    pub score: f64,
}

#[cfg(feature = "serde")]
pub(crate) mod extended_f64 {
    //! JSON has no infinities; they travel as the strings "inf" / "-inf".
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<'a> {
        Num(f64),
        Str(&'a str),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str("inf") => Ok(f64::INFINITY),
            Repr::Str("-inf") => Ok(f64::NEG_INFINITY),
            Repr::Str(other) => Err(de::Error::custom(alloc::format!("bad number `{other}`"))),
        }
    }
}
