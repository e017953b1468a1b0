//! Dataset model shared by all plugins: channels, single features, segments
//! and sampling metadata.
//!
//! A dataset holds N records of K samples each. Time-series channels are
//! N x K matrices, single features are length-N columns. Sample indices are
//! 1-based in every user-facing interface. NaN is a legal channel value.

use crate::error::{Error, Result};

/// Sampling metadata shared by all channels of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    k_count: usize,
    sample_rate: f64,
}

impl SampleGrid {
    pub fn new(k_count: usize, sample_rate: f64) -> Result<Self> {
        if k_count == 0 {
            return Err(Error::Parameter {
                name: "k_count".into(),
                message: "must be at least 1".into(),
            });
        }
        if !(sample_rate > 0.0) {
            return Err(Error::Parameter {
                name: "sample_rate".into(),
                message: "must be positive".into(),
            });
        }
        Ok(Self {
            k_count,
            sample_rate,
        })
    }

    pub fn k_count(&self) -> usize {
        self.k_count
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }
}

/// A named N x K time-series matrix, stored row-major (one row per record).
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    name: String,
    values: Vec<f64>,
    k_count: usize,
}

impl Channel {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Samples of one record, 0-based record index.
    pub fn row(&self, record: usize) -> &[f64] {
        let start = record * self.k_count;
        &self.values[start..start + self.k_count]
    }

    pub fn n_records(&self) -> usize {
        self.values.len() / self.k_count
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A named length-N column of scalar features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    name: String,
    values: Vec<f64>,
}

impl FeatureColumn {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Per-record inclusive sample-index windows, 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    ranges: Vec<(usize, usize)>,
}

impl Segment {
    /// `ranges` holds one `(start, end)` pair per record, 1-based inclusive.
    pub fn new(ranges: Vec<(usize, usize)>, k_count: usize) -> Result<Self> {
        for (record, &(start, end)) in ranges.iter().enumerate() {
            if start < 1 || start > end || end > k_count {
                return Err(Error::Parameter {
                    name: "segment".into(),
                    message: format!(
                        "record {}: range ({start},{end}) violates 1 <= start <= end <= {k_count}",
                        record + 1
                    ),
                });
            }
        }
        Ok(Self { ranges })
    }

    pub fn n_records(&self) -> usize {
        self.ranges.len()
    }

    /// 1-based inclusive bounds for a 0-based record index.
    pub fn range(&self, record: usize) -> (usize, usize) {
        self.ranges[record]
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    /// Length of the window for a 0-based record index.
    pub fn len_for(&self, record: usize) -> usize {
        let (start, end) = self.ranges[record];
        end - start + 1
    }
}

/// N records x S channels x K samples plus an N x F single-feature table.
///
/// Values are immutable after construction; plugin application produces new
/// channels and features through [`Dataset::add_channel`] /
/// [`Dataset::add_feature`] in a single-owner build phase. Safe to share
/// read-only across parallel workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    grid: SampleGrid,
    n_records: usize,
    channels: Vec<Channel>,
    features: Vec<FeatureColumn>,
    segments: Vec<(String, Segment)>,
}

impl Dataset {
    pub fn new(grid: SampleGrid, n_records: usize) -> Result<Self> {
        if n_records == 0 {
            return Err(Error::EmptyData("dataset needs at least one record".into()));
        }
        Ok(Self {
            grid,
            n_records,
            channels: Vec::new(),
            features: Vec::new(),
            segments: Vec::new(),
        })
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    pub fn n_records(&self) -> usize {
        self.n_records
    }

    pub fn k_count(&self) -> usize {
        self.grid.k_count
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn features(&self) -> &[FeatureColumn] {
        &self.features
    }

    pub fn segments(&self) -> &[(String, Segment)] {
        &self.segments
    }

    pub fn channel(&self, name: &str) -> Result<&Channel> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownChannel(name.into()))
    }

    pub fn feature(&self, name: &str) -> Result<&FeatureColumn> {
        self.features
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFeature(name.into()))
    }

    pub fn segment(&self, name: &str) -> Result<&Segment> {
        self.segments
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownSegment(name.into()))
    }

    pub fn has_channel(&self, name: &str) -> bool {
        self.channels.iter().any(|c| c.name == name)
    }

    pub fn has_feature(&self, name: &str) -> bool {
        self.features.iter().any(|f| f.name == name)
    }

    fn check_name(&self, name: &str) -> Result<()> {
        if name.is_empty() {
            return Err(Error::Parameter {
                name: "name".into(),
                message: "must be nonempty".into(),
            });
        }
        if self.has_channel(name) || self.has_feature(name) {
            return Err(Error::DuplicateName(name.into()));
        }
        Ok(())
    }

    /// Appends an N x K channel. `values` is row-major,
    /// length `n_records * k_count`.
    pub fn add_channel(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        self.check_name(&name)?;
        let expected = self.n_records * self.grid.k_count;
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                what: format!("channel `{name}`"),
                expected,
                actual: values.len(),
            });
        }
        self.channels.push(Channel {
            name,
            values,
            k_count: self.grid.k_count,
        });
        Ok(())
    }

    /// Appends a channel from per-record rows of length K.
    pub fn add_channel_rows(&mut self, name: impl Into<String>, rows: &[Vec<f64>]) -> Result<()> {
        let name = name.into();
        if rows.len() != self.n_records {
            return Err(Error::ShapeMismatch {
                what: format!("channel `{name}` record count"),
                expected: self.n_records,
                actual: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(self.n_records * self.grid.k_count);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != self.grid.k_count {
                return Err(Error::ShapeMismatch {
                    what: format!("channel `{name}` record {}", i + 1),
                    expected: self.grid.k_count,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        self.add_channel(name, values)
    }

    /// Appends a length-N feature column.
    pub fn add_feature(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        self.check_name(&name)?;
        if values.len() != self.n_records {
            return Err(Error::ShapeMismatch {
                what: format!("feature `{name}`"),
                expected: self.n_records,
                actual: values.len(),
            });
        }
        self.features.push(FeatureColumn { name, values });
        Ok(())
    }

    pub fn add_segment(&mut self, name: impl Into<String>, segment: Segment) -> Result<()> {
        let name = name.into();
        if self.segments.iter().any(|(n, _)| *n == name) {
            return Err(Error::DuplicateName(name));
        }
        if segment.n_records() != self.n_records {
            return Err(Error::ShapeMismatch {
                what: format!("segment `{name}` record count"),
                expected: self.n_records,
                actual: segment.n_records(),
            });
        }
        self.segments.push((name, segment));
        Ok(())
    }
}

/// Returns the in-segment samples of one record, 1-based inclusive bounds.
pub fn slice_segment<'a>(
    channel: &'a Channel,
    segment: &Segment,
    record: usize,
) -> Result<&'a [f64]> {
    let n = channel.n_records();
    if record >= n {
        return Err(Error::IndexOutOfRange {
            what: "record",
            index: record + 1,
            max: n,
        });
    }
    let (start, end) = segment.range(record);
    let row = channel.row(record);
    Ok(&row[start - 1..end])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        let grid = SampleGrid::new(4, 100.0).unwrap();
        let mut ds = Dataset::new(grid, 2).unwrap();
        ds.add_channel("x", vec![5.0, 6.0, 7.0, 8.0, 1.0, 2.0, 9.0, 4.0])
            .unwrap();
        ds
    }

    #[test]
    fn slice_inclusive_bounds() {
        let ds = toy();
        let seg = Segment::new(vec![(2, 3), (3, 3)], 4).unwrap();
        let c = ds.channel("x").unwrap();
        assert_eq!(slice_segment(c, &seg, 0).unwrap(), &[6.0, 7.0]);
        assert_eq!(slice_segment(c, &seg, 1).unwrap(), &[9.0]);
    }

    #[test]
    fn slice_full_is_identity() {
        let ds = toy();
        let seg = Segment::new(vec![(1, 4), (1, 4)], 4).unwrap();
        let c = ds.channel("x").unwrap();
        assert_eq!(slice_segment(c, &seg, 0).unwrap(), c.row(0));
        assert_eq!(slice_segment(c, &seg, 1).unwrap(), c.row(1));
    }

    #[test]
    fn slice_record_out_of_range() {
        let ds = toy();
        let seg = Segment::new(vec![(1, 4), (1, 4)], 4).unwrap();
        let c = ds.channel("x").unwrap();
        assert!(matches!(
            slice_segment(c, &seg, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn add_channel_checks_name_and_shape() {
        let mut ds = toy();
        assert!(matches!(
            ds.add_channel("x", vec![0.0; 8]),
            Err(Error::DuplicateName(_))
        ));
        assert!(matches!(
            ds.add_channel("y", vec![0.0; 7]),
            Err(Error::ShapeMismatch { .. })
        ));
        ds.add_channel("V(x)", vec![0.0; 8]).unwrap();
        assert_eq!(ds.channels().len(), 2);
    }

    #[test]
    fn add_feature_checks_length() {
        let mut ds = toy();
        assert!(matches!(
            ds.add_feature("f", vec![1.0]),
            Err(Error::ShapeMismatch { .. })
        ));
        ds.add_feature("f", vec![1.0, 2.0]).unwrap();
        assert_eq!(ds.feature("f").unwrap().values(), &[1.0, 2.0]);
    }

    #[test]
    fn lookup_returns_bitwise_equal_values() {
        let mut ds = toy();
        let vals = vec![0.25, -0.5, f64::NAN, 3.25, 0.0, 1.0, 2.0, 3.0];
        ds.add_channel("z", vals.clone()).unwrap();
        let got = ds.channel("z").unwrap().values();
        assert_eq!(got.len(), vals.len());
        for (a, b) in got.iter().zip(vals.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn segment_invariant_enforced() {
        assert!(Segment::new(vec![(0, 2)], 4).is_err());
        assert!(Segment::new(vec![(3, 2)], 4).is_err());
        assert!(Segment::new(vec![(1, 5)], 4).is_err());
        assert!(Segment::new(vec![(1, 4)], 4).is_ok());
    }
}
