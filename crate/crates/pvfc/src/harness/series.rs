use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Recorded signals, named as they appear in the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    #[serde(rename = "time_s")]
    Time,
    #[serde(rename = "v_dc_V")]
    VDc,
    #[serde(rename = "i_a_A")]
    IA,
    #[serde(rename = "i_b_A")]
    IB,
    #[serde(rename = "i_c_A")]
    IC,
    #[serde(rename = "v_a_V")]
    VA,
    #[serde(rename = "v_b_V")]
    VB,
    #[serde(rename = "v_c_V")]
    VC,
    #[serde(rename = "P_grid_W")]
    PGrid,
    #[serde(rename = "Q_grid_var")]
    QGrid,
    #[serde(rename = "P_pv_W")]
    PPv,
    #[serde(rename = "P_fc_W")]
    PFc,
    #[serde(rename = "P_dump_W")]
    PDump,
    #[serde(rename = "mode")]
    Mode,
}

impl Channel {
    pub const ALL: [Channel; 14] = [
        Channel::Time,
        Channel::VDc,
        Channel::IA,
        Channel::IB,
        Channel::IC,
        Channel::VA,
        Channel::VB,
        Channel::VC,
        Channel::PGrid,
        Channel::QGrid,
        Channel::PPv,
        Channel::PFc,
        Channel::PDump,
        Channel::Mode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Time => "time_s",
            Channel::VDc => "v_dc_V",
            Channel::IA => "i_a_A",
            Channel::IB => "i_b_A",
            Channel::IC => "i_c_A",
            Channel::VA => "v_a_V",
            Channel::VB => "v_b_V",
            Channel::VC => "v_c_V",
            Channel::PGrid => "P_grid_W",
            Channel::QGrid => "Q_grid_var",
            Channel::PPv => "P_pv_W",
            Channel::PFc => "P_fc_W",
            Channel::PDump => "P_dump_W",
            Channel::Mode => "mode",
        }
    }

    pub fn from_name(s: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == s)
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Column store of decimated samples. Channels absent from a parsed CSV are empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    columns: [Vec<f64>; 14],
}

impl TimeSeries {
    pub fn with_capacity(n: usize) -> Self {
        TimeSeries {
            columns: std::array::from_fn(|_| Vec::with_capacity(n)),
        }
    }

    /// Appends one record ordered as [`Channel::ALL`].
    pub fn push(&mut self, row: [f64; 14]) {
        for (c, v) in self.columns.iter_mut().zip(row) {
            c.push(v);
        }
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has(&self, ch: Channel) -> bool {
        self.columns[ch.index()].len() == self.len() && !self.is_empty()
    }

    pub fn get(&self, ch: Channel) -> &[f64] {
        &self.columns[ch.index()]
    }

    /// Sample spacing inferred from the time column.
    pub fn sample_period(&self) -> Option<f64> {
        let t = self.get(Channel::Time);
        (t.len() >= 2).then(|| (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64)
    }

    /// Writes the selected channels as CSV; floats use the shortest round-trip form.
    pub fn write_csv<W: Write>(&self, w: W, channels: &[Channel]) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(channels.iter().map(|c| c.name()))
            .map_err(io)?;
        let mut row = Vec::with_capacity(channels.len());
        for k in 0..self.len() {
            row.clear();
            for &c in channels {
                let v = self.columns[c.index()][k] + 0.0; // folds −0 into 0
                row.push(if c == Channel::Mode {
                    format!("{}", v as i64)
                } else {
                    format!("{v}")
                });
            }
            out.write_record(&row).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_csv_string(&self, channels: &[Channel]) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, channels)
            .expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Parses a CSV with a header of known channel names; unknown columns are errors.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().from_reader(r);
        let bad = |e: csv::Error| Error::Config(format!("CSV: {e}"));
        let header = rd.headers().map_err(bad)?.clone();
        let chans = header
            .iter()
            .map(|h| {
                Channel::from_name(h.trim())
                    .ok_or_else(|| Error::Config(format!("CSV: unknown column {h:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !chans.contains(&Channel::Time) {
            return Err(Error::Config("CSV: missing time_s column".into()));
        }
        let mut ts = TimeSeries::default();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec.map_err(bad)?;
            for (c, field) in chans.iter().zip(rec.iter()) {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Config(format!("CSV row {}: bad number {field:?}", line + 2))
                })?;
                ts.columns[c.index()].push(v);
            }
        }
        Ok(ts)
    }
}
