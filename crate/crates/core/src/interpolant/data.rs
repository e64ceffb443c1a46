use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_fn::MultiIndex;

/// A sampled quantity: a partial derivative `∂^γ u` or a power `𝔅^s u` of
/// the second-order operator (the Laplacian when `B = I`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Partial(MultiIndex),
    Power(u32),
}

impl Channel {
    pub fn value(dim: usize) -> Self {
        Channel::Partial(MultiIndex::zeros(dim))
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Partial(g) => write!(f, "partial{g}"),
            Channel::Power(s) => write!(f, "power({s})"),
        }
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("partial") {
            return rest.parse().map(Channel::Partial);
        }
        if let Some(rest) = s.strip_prefix("power") {
            let inner = rest.trim().trim_start_matches('(').trim_end_matches(')');
            return inner
                .trim()
                .parse()
                .map(Channel::Power)
                .map_err(|_| Error::Format(format!("bad channel {s:?}")));
        }
        Err(Error::Format(format!("bad channel {s:?}")))
    }
}

impl Serialize for Channel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Box of lattice indices `lower ≤ m ≤ upper` (inclusive), traversed
/// row-major with the last axis fastest. An optional mask restricts it to
/// `Ω ∩ hℤⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    lower: Vec<i64>,
    upper: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<Vec<bool>>,
}

impl Window {
    pub fn new(lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidConfig("empty lattice window".into()));
        }
        Ok(Self {
            lower,
            upper,
            mask: None,
        })
    }

    /// Smallest box containing every lattice point `hm` inside the given
    /// per-axis intervals.
    pub fn covering(h: f64, intervals: &[(f64, f64)]) -> Result<Self> {
        let snap = |v: f64, up: bool| {
            let r = v.round();
            if (v - r).abs() < 1e-9 {
                r as i64
            } else if up {
                v.ceil() as i64
            } else {
                v.floor() as i64
            }
        };
        let lower = intervals.iter().map(|&(a, _)| snap(a / h, true)).collect();
        let upper = intervals.iter().map(|&(_, b)| snap(b / h, false)).collect();
        Self::new(lower, upper)
    }

    /// Restricts the window to lattice points with `in_domain(hm)`.
    pub fn with_domain<F: Fn(&[f64]) -> bool>(mut self, h: f64, in_domain: F) -> Self {
        let mut mask = Vec::with_capacity(self.len());
        let mut x = vec![0.0; self.dim()];
        for m in self.iter() {
            for (xi, &mi) in x.iter_mut().zip(&m) {
                *xi = h * mi as f64;
            }
            mask.push(in_domain(&x));
        }
        self.mask = Some(mask);
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l + 1) as usize)
            .collect()
    }

    /// Number of box points (masked points included).
    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_masked(&self) -> bool {
        self.mask.is_some()
    }

    /// Number of points inside `Ω`.
    pub fn active_len(&self) -> usize {
        match &self.mask {
            Some(m) => m.iter().filter(|&&b| b).count(),
            None => self.len(),
        }
    }

    /// Row-major position of lattice index `m`, if it lies in the box.
    pub fn linear_index(&self, m: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((&mi, &l), &u) in m.iter().zip(&self.lower).zip(&self.upper) {
            if mi < l || mi > u {
                return None;
            }
            idx = idx * (u - l + 1) as usize + (mi - l) as usize;
        }
        Some(idx)
    }

    pub fn is_active(&self, linear: usize) -> bool {
        self.mask.as_ref().map_or(true, |m| m[linear])
    }

    /// Lattice indices in storage order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let shape = self.shape();
        (0..self.len()).map(move |mut k| {
            let mut m = vec![0i64; shape.len()];
            for axis in (0..shape.len()).rev() {
                m[axis] = self.lower[axis] + (k % shape[axis]) as i64;
                k /= shape[axis];
            }
            m
        })
    }

    /// Distance from `x` to the boundary of the box hull `[h·lower, h·upper]`
    /// (zero outside).
    pub fn box_distance(&self, h: f64, x: &[f64]) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(x)
            .map(|((&l, &u), &xi)| (xi - h * l as f64).min(h * u as f64 - xi))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }
}

/// Samples of `u` and its derivative channels over a lattice window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Serialize + Clone",
    deserialize = "R: Deserialize<'de>"
))]
pub struct HermiteData<R> {
    pub h: f64,
    #[serde(rename = "dimension")]
    pub dim: usize,
    pub window: Window,
    #[serde(with = "channel_list")]
    pub channels: BTreeMap<Channel, Vec<R>>,
}

mod channel_list {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Entry<R> {
        channel: Channel,
        values: Vec<R>,
    }

    pub fn serialize<R: Serialize + Clone, S: Serializer>(
        map: &BTreeMap<Channel, Vec<R>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<Entry<R>> = map
            .iter()
            .map(|(c, v)| Entry {
                channel: c.clone(),
                values: v.clone(),
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, R: Deserialize<'de>, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Channel, Vec<R>>, D::Error> {
        let list = Vec::<Entry<R>>::deserialize(d)?;
        Ok(list.into_iter().map(|e| (e.channel, e.values)).collect())
    }
}

impl<R: Real + Serialize + for<'de> Deserialize<'de>> HermiteData<R> {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let data: Self = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        data.validate()?;
        Ok(data)
    }
}

impl<R: Real> HermiteData<R> {
    pub fn validate(&self) -> Result<()> {
        if self.window.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.window.dim(),
            });
        }
        if !(self.h > 0.0) {
            return Err(Error::InvalidConfig("h must be positive".into()));
        }
        let expected = self.window.len();
        for (c, v) in &self.channels {
            if v.len() != expected {
                return Err(Error::ChannelShape {
                    channel: c.clone(),
                    expected,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    pub fn channel(&self, c: &Channel) -> Result<&[R]> {
        self.channels
            .get(c)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingChannel(c.clone()))
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }
}

/// Fills every requested channel by calling `source(channel, hm)` at each
/// active window point. Masked points hold zero.
pub fn sample_on_window<R, F>(
    source: F,
    window: &Window,
    h: f64,
    channels: &[Channel],
) -> Result<HermiteData<R>>
where
    R: Real,
    F: Fn(&Channel, &[R]) -> Option<R>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidConfig("h must be positive".into()));
    }
    let dim = window.dim();
    let hr = <R as Real>::from_f64(h);
    let mut out = BTreeMap::new();
    for c in channels {
        if let Channel::Partial(g) = c {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        let mut values = Vec::with_capacity(window.len());
        let mut x = vec![R::zero(); dim];
        for (k, m) in window.iter().enumerate() {
            if !window.is_active(k) {
                values.push(R::zero());
                continue;
            }
            for (xi, &mi) in x.iter_mut().zip(&m) {
                *xi = hr * <R as Real>::from_f64(mi as f64);
            }
            values.push(source(c, &x).ok_or_else(|| Error::MissingChannel(c.clone()))?);
        }
        out.insert(c.clone(), values);
    }
    Ok(HermiteData {
        h,
        dim,
        window: window.clone(),
        channels: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_round_trip() {
        for c in [Channel::Partial(MultiIndex::from([1, 0])), Channel::Power(2)] {
            assert_eq!(c.to_string().parse::<Channel>().unwrap(), c);
        }
        assert!("grad(1)".parse::<Channel>().is_err());
    }

    #[test]
    fn window_indexing() {
        let w = Window::new(vec![-1, 0], vec![1, 2]).unwrap();
        assert_eq!(w.len(), 9);
        let pts: Vec<_> = w.iter().collect();
        assert_eq!(pts[0], vec![-1, 0]);
        assert_eq!(pts[1], vec![-1, 1]);
        for (k, m) in pts.iter().enumerate() {
            assert_eq!(w.linear_index(m), Some(k));
        }
        assert_eq!(w.linear_index(&[2, 0]), None);
    }

    #[test]
    fn covering_counts() {
        let w = Window::covering(0.1, &[(-2.0, 2.0)]).unwrap();
        assert_eq!(w.len(), 41);
        assert_eq!(w.lower(), &[-20]);
    }

    #[test]
    fn missing_channel() {
        let w = Window::new(vec![0], vec![3]).unwrap();
        let err = sample_on_window::<f64, _>(
            |c, x| match c {
                Channel::Partial(g) if g.is_zero() => Some(x[0]),
                _ => None,
            },
            &w,
            0.5,
            &[Channel::value(1), Channel::Power(1)],
        )
        .unwrap_err();
        assert_eq!(err, Error::MissingChannel(Channel::Power(1)));
    }
}
