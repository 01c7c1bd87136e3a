//! Threshold table mapping SINR to spectral efficiency.

use serde::{Deserialize, Serialize};

use super::PrecodeError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModCodRow {
    pub threshold_db: f64,
    pub spectral_efficiency: f64,
}

/// Rows strictly increasing in both threshold and efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModCodTable {
    rows: Vec<ModCodRow>,
}

impl ModCodTable {
    pub fn new(rows: Vec<ModCodRow>) -> Result<Self, PrecodeError> {
        if rows.is_empty() {
            return Err(PrecodeError::ModCodTable("no rows".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if !(r.threshold_db.is_finite() && r.spectral_efficiency.is_finite() && r.spectral_efficiency > 0.0) {
                return Err(PrecodeError::ModCodTable(format!("row {i} is not finite and positive")));
            }
        }
        for (i, pair) in rows.windows(2).enumerate() {
            if pair[1].threshold_db <= pair[0].threshold_db
                || pair[1].spectral_efficiency <= pair[0].spectral_efficiency
            {
                return Err(PrecodeError::ModCodTable(format!("row {} does not increase", i + 1)));
            }
        }
        Ok(Self { rows })
    }

    /// Five synthetic rows: -2, 2, 6, 10, 14 dB at 0.5, 1, 2, 3, 4 bit/s/Hz.
    pub fn demo() -> Self {
        let rows = [(-2.0, 0.5), (2.0, 1.0), (6.0, 2.0), (10.0, 3.0), (14.0, 4.0)]
            .into_iter()
            .map(|(threshold_db, spectral_efficiency)| ModCodRow { threshold_db, spectral_efficiency })
            .collect();
        Self { rows }
    }

    /// Reads `threshold_db,spectral_efficiency` CSV with a header row.
    pub fn from_csv(text: &str) -> Result<Self, PrecodeError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<Result<Vec<ModCodRow>, _>>()
            .map_err(|e| PrecodeError::ModCodTable(e.to_string()))?;
        Self::new(rows)
    }

    pub fn rows(&self) -> &[ModCodRow] {
        &self.rows
    }

    /// Highest row whose threshold does not exceed `sinr_db`.
    pub fn lookup(&self, sinr_db: f64) -> Option<&ModCodRow> {
        let n = self.rows.partition_point(|r| r.threshold_db <= sinr_db);
        n.checked_sub(1).map(|i| &self.rows[i])
    }

    pub fn efficiency(&self, sinr_db: f64) -> Option<f64> {
        self.lookup(sinr_db).map(|r| r.spectral_efficiency)
    }
}
