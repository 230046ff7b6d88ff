//! Whole-series recomputation of the cumulative statistics.

use super::MetricsRow;

/// Prefix means over the defined entries; `None` until the first one.
pub fn prefix_means(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut sum = 0.0;
    let mut count = 0usize;
    values
        .iter()
        .map(|v| {
            if let Some(x) = v {
                sum += x;
                count += 1;
            }
            (count > 0).then(|| sum / count as f64)
        })
        .collect()
}

fn defined(values: Vec<f64>) -> Vec<Option<f64>> {
    values.into_iter().map(Some).collect()
}

fn unwrap_all(values: Vec<Option<f64>>) -> Vec<f64> {
    values.into_iter().map(|v| v.expect("every entry defined")).collect()
}

/// `(overall, cumulative series)` of the all-site average energy efficiency.
pub fn ee_averages(rows: &[MetricsRow]) -> (Option<f64>, Vec<f64>) {
    let series = unwrap_all(prefix_means(&defined(rows.iter().map(MetricsRow::ee_avg_all).collect())));
    (series.last().copied(), series)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputPower {
    /// Cumulative average throughput, bit/s.
    pub thr_cum: Vec<f64>,
    /// Per-step average power, dBW.
    pub pwr: Vec<Option<f64>>,
    /// Cumulative mean of the per-step dBW averages.
    pub pwr_cum: Vec<Option<f64>>,
}

pub fn throughput_power_averages(rows: &[MetricsRow]) -> ThroughputPower {
    let thr_cum = unwrap_all(prefix_means(&defined(rows.iter().map(MetricsRow::throughput_avg).collect())));
    let pwr: Vec<Option<f64>> = rows.iter().map(MetricsRow::power_avg_dbw).collect();
    let pwr_cum = prefix_means(&pwr);
    ThroughputPower { thr_cum, pwr, pwr_cum }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declines {
    pub rsrp: Vec<Option<f64>>,
    pub itf: Vec<Option<f64>>,
    /// `itf - rsrp` per step.
    pub gap: Vec<Option<f64>>,
    pub rsrp_cum: Vec<Option<f64>>,
    pub itf_cum: Vec<Option<f64>>,
}

pub fn decline_averages(rows: &[MetricsRow]) -> Declines {
    let rsrp: Vec<Option<f64>> = rows.iter().map(MetricsRow::rsrp_decline_dbw).collect();
    let itf: Vec<Option<f64>> = rows.iter().map(MetricsRow::itf_decline_dbw).collect();
    let gap = rsrp.iter().zip(&itf).map(|(s, i)| Some((*i)? - (*s)?)).collect();
    Declines { rsrp_cum: prefix_means(&rsrp), itf_cum: prefix_means(&itf), rsrp, itf, gap }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Complexity {
    pub success_overall: Option<f64>,
    pub success_cum: Vec<Option<f64>>,
    pub iter_overall: Option<f64>,
    pub iter_cum: Vec<Option<f64>>,
}

pub fn complexity_averages(rows: &[MetricsRow]) -> Complexity {
    let success_cum = prefix_means(&rows.iter().map(MetricsRow::zeta_sample).collect::<Vec<_>>());
    let iter_cum = prefix_means(&rows.iter().map(MetricsRow::iteration_sample).collect::<Vec<_>>());
    Complexity {
        success_overall: success_cum.last().copied().flatten(),
        iter_overall: iter_cum.last().copied().flatten(),
        success_cum,
        iter_cum,
    }
}
