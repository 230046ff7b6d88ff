//! Per-episode statistics: energy efficiency, throughput, power, RSRP and
//! interference decline, success ratio and accepted-iteration counts.
//!
//! Two paths compute the cumulative series: [`Accumulator`] streams them
//! with incremental means while the run progresses, and the batch functions
//! in [`batch`] recompute them from the stored rows.

pub mod batch;
mod row;
mod stream;

pub use batch::{complexity_averages, decline_averages, ee_averages, prefix_means, throughput_power_averages};
pub use row::MetricsRow;
pub use stream::{Accumulator, CsvRecord, MetricsWriter, Overall, CSV_COLUMNS};
