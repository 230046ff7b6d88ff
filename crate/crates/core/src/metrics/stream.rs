use std::io::Write;

use serde::Serialize;

use super::MetricsRow;
use crate::error::Result;

/// Column order of `metrics.csv`.
pub const CSV_COLUMNS: [&str; 14] = [
    "t",
    "ee_reward",
    "ee_avg_allB",
    "ee_cum",
    "thr_cum_bps",
    "pwr_avg_dbw",
    "pwr_cum_dbw",
    "rsrp_decl_dbw",
    "itf_decl_dbw",
    "decl_gap_dbw",
    "zeta",
    "n_star",
    "success_cum",
    "iter_cum",
];

/// One CSV line. `None` is written as an empty cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRecord {
    pub t: usize,
    pub ee_reward: Option<f64>,
    #[serde(rename = "ee_avg_allB")]
    pub ee_avg_all: f64,
    pub ee_cum: f64,
    pub thr_cum_bps: f64,
    pub pwr_avg_dbw: Option<f64>,
    pub pwr_cum_dbw: Option<f64>,
    pub rsrp_decl_dbw: Option<f64>,
    pub itf_decl_dbw: Option<f64>,
    pub decl_gap_dbw: Option<f64>,
    pub zeta: Option<u8>,
    pub n_star: Option<usize>,
    pub success_cum: Option<f64>,
    pub iter_cum: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct RunningMean {
    n: usize,
    mean: f64,
}

impl RunningMean {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.mean += (x - self.mean) / self.n as f64;
    }

    fn push_opt(&mut self, x: Option<f64>) {
        if let Some(x) = x {
            self.push(x);
        }
    }

    fn value(&self) -> Option<f64> {
        (self.n > 0).then_some(self.mean)
    }
}

/// Final cumulative values of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Overall {
    pub episodes: usize,
    pub ee: f64,
    pub throughput_bps: f64,
    pub power_dbw: Option<f64>,
    pub rsrp_decline_dbw: Option<f64>,
    pub itf_decline_dbw: Option<f64>,
    /// Cumulative interference decline minus cumulative RSRP decline.
    pub decline_gap_dbw: Option<f64>,
    pub success_ratio: Option<f64>,
    pub iterations: Option<f64>,
}

/// Streaming computation of the cumulative statistics.
#[derive(Debug, Clone, Default)]
pub struct Accumulator {
    rows: usize,
    ee: RunningMean,
    thr: RunningMean,
    pwr: RunningMean,
    rsrp: RunningMean,
    itf: RunningMean,
    success: RunningMean,
    iter: RunningMean,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds in `row` and returns its CSV line.
    pub fn push(&mut self, row: &MetricsRow) -> CsvRecord {
        self.rows += 1;
        let ee_avg_all = row.ee_avg_all();
        self.ee.push(ee_avg_all);
        self.thr.push(row.throughput_avg());
        let pwr = row.power_avg_dbw();
        self.pwr.push_opt(pwr);
        let rsrp = row.rsrp_decline_dbw();
        let itf = row.itf_decline_dbw();
        self.rsrp.push_opt(rsrp);
        self.itf.push_opt(itf);
        self.success.push_opt(row.zeta_sample());
        self.iter.push_opt(row.iteration_sample());
        CsvRecord {
            t: row.t,
            ee_reward: row.reward,
            ee_avg_all,
            ee_cum: self.ee.mean,
            thr_cum_bps: self.thr.mean,
            pwr_avg_dbw: pwr,
            pwr_cum_dbw: self.pwr.value(),
            rsrp_decl_dbw: rsrp,
            itf_decl_dbw: itf,
            decl_gap_dbw: row.decline_gap_dbw(),
            zeta: row.zeta.map(u8::from),
            n_star: row.n_star,
            success_cum: self.success.value(),
            iter_cum: self.iter.value(),
        }
    }

    pub fn overall(&self) -> Overall {
        let rsrp = self.rsrp.value();
        let itf = self.itf.value();
        Overall {
            episodes: self.rows,
            ee: self.ee.mean,
            throughput_bps: self.thr.mean,
            power_dbw: self.pwr.value(),
            rsrp_decline_dbw: rsrp,
            itf_decline_dbw: itf,
            decline_gap_dbw: rsrp.zip(itf).map(|(s, i)| i - s),
            success_ratio: self.success.value(),
            iterations: self.iter.value(),
        }
    }
}

/// `metrics.csv` writer with the fixed column order.
pub struct MetricsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        inner.write_record(CSV_COLUMNS)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, rec: &CsvRecord) -> Result<()> {
        self.inner.serialize(rec)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| crate::Error::Io(e.into_error()))
    }
}
