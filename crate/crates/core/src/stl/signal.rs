use std::io::{Read, Write};

use super::StlError;

/// A uniformly sampled, multi-channel real-valued trace.
///
/// Sample `k` sits at time `t0 + k * dt`. Values are stored row-major, one row
/// per sample and one column per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    channel_names: Vec<String>,
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

impl Signal {
    /// Builds a signal from row-major samples (`values.len() == n_samples * channels`).
    pub fn new(
        channel_names: Vec<String>,
        t0: f64,
        dt: f64,
        values: Vec<f64>,
    ) -> Result<Self, StlError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StlError::InvalidSignal(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if !t0.is_finite() {
            return Err(StlError::InvalidSignal("start time must be finite".into()));
        }
        if channel_names.is_empty() {
            return Err(StlError::InvalidSignal("signal has no channels".into()));
        }
        for (i, name) in channel_names.iter().enumerate() {
            if channel_names[..i].contains(name) {
                return Err(StlError::InvalidSignal(format!(
                    "duplicate channel '{name}'"
                )));
            }
        }
        let width = channel_names.len();
        if values.is_empty() || !values.len().is_multiple_of(width) {
            return Err(StlError::InvalidSignal(format!(
                "{} values do not fill whole rows of {width} channels",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(StlError::InvalidSignal(format!(
                "non-finite value at sample {}, channel '{}'",
                bad / width,
                channel_names[bad % width]
            )));
        }
        Ok(Signal {
            channel_names,
            t0,
            dt,
            values,
        })
    }

    /// Builds a signal from one column vector per channel.
    pub fn from_columns(
        channels: Vec<(String, Vec<f64>)>,
        t0: f64,
        dt: f64,
    ) -> Result<Self, StlError> {
        let len = channels.first().map(|c| c.1.len()).unwrap_or(0);
        if channels.iter().any(|c| c.1.len() != len) {
            return Err(StlError::InvalidSignal("channels differ in length".into()));
        }
        let mut values = Vec::with_capacity(len * channels.len());
        for k in 0..len {
            values.extend(channels.iter().map(|c| c.1[k]));
        }
        let names = channels.into_iter().map(|c| c.0).collect();
        Signal::new(names, t0, dt, values)
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.channel_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of the last sample.
    pub fn end_time(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channel_names.iter().position(|c| c == name)
    }

    pub fn value(&self, k: usize, channel: usize) -> f64 {
        self.values[k * self.channel_names.len() + channel]
    }

    /// Iterates over one channel's samples.
    pub fn channel(&self, channel: usize) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .skip(channel)
            .step_by(self.channel_names.len())
            .copied()
    }

    /// Grid index of time `t`, or `None` when `t` is not (numerically) on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let pos = (t - self.t0) / self.dt;
        let k = pos.round();
        if k < 0.0 || (pos - k).abs() > 1e-6 {
            return None;
        }
        let k = k as usize;
        (k < self.len()).then_some(k)
    }

    /// Reads the `time,ch1,ch2,...` CSV format. Time steps must be uniform.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, StlError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("time") {
            return Err(StlError::InvalidSignal(
                "first CSV column must be 'time'".into(),
            ));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != names.len() + 1 {
                return Err(StlError::InvalidSignal(format!(
                    "row {} has {} fields, expected {}",
                    row + 1,
                    record.len(),
                    names.len() + 1
                )));
            }
            for (col, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    StlError::InvalidSignal(format!("row {}: '{field}' is not a number", row + 1))
                })?;
                if col == 0 {
                    times.push(v);
                } else {
                    values.push(v);
                }
            }
        }
        let (t0, dt) = match times.as_slice() {
            [] => return Err(StlError::InvalidSignal("CSV has no samples".into())),
            // A single sample carries no step information; any positive step works.
            [t0] => (*t0, 1.0),
            [t0, t1, ..] => (*t0, t1 - t0),
        };
        for (k, &t) in times.iter().enumerate() {
            let expected = t0 + k as f64 * dt;
            if (t - expected).abs() > 1e-6 * dt.abs().max(1.0) {
                return Err(StlError::InvalidSignal(format!(
                    "non-uniform time step at row {}",
                    k + 1
                )));
            }
        }
        Signal::new(names, t0, dt, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), StlError> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["time".to_owned()];
        header.extend(self.channel_names.iter().cloned());
        wtr.write_record(&header)?;
        let width = self.channel_names.len();
        for k in 0..self.len() {
            let mut row = Vec::with_capacity(width + 1);
            row.push(format!("{}", self.time(k)));
            row.extend(
                self.values[k * width..(k + 1) * width]
                    .iter()
                    .map(|v| format!("{v}")),
            );
            wtr.write_record(&row)?;
        }
        wtr.flush().map_err(|e| StlError::Io(e.to_string()))?;
        Ok(())
    }
}
