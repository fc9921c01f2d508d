//! Bundled example curves, also shipped as CSV under `fixtures/`.
//!
//! The Microsoft 5y/10y quotes, the Freddie Mac 2y level and the AIB 6m/1y
//! inversion follow published market observations; the remaining tenors and
//! the Microsoft path after its first two dates are illustrative.

use crate::curve::{CdsCurve, Tenor};
use crate::scanner::{ingest_reader, IngestOptions};

pub const ANOMALIES_CSV: &str = include_str!("../fixtures/anomalies.csv");
pub const FREDDIE_CSV: &str = include_str!("../fixtures/freddie.csv");
pub const MSFT_PATH_CSV: &str = include_str!("../fixtures/msft_path.csv");

fn load(csv: &str) -> Vec<CdsCurve> {
    let got = ingest_reader(csv.as_bytes(), IngestOptions::default()).expect("bundled fixture parses");
    assert!(got.rejections.is_empty(), "bundled fixture has bad rows");
    got.curves
}

fn entity(csv: &str, id: &str) -> CdsCurve {
    load(csv)
        .into_iter()
        .find(|c| c.entity().entity_id == id)
        .expect("entity present in fixture")
}

/// Microsoft, 3 December 2008: 5y at 89.53bp over 10y at 33.55bp.
pub fn msft() -> CdsCurve {
    entity(ANOMALIES_CSV, "MSFT")
}

/// AIB, 4 December 2008: 6m above 1y.
pub fn aib() -> CdsCurve {
    entity(ANOMALIES_CSV, "AIB")
}

/// An AAA name in September 2008 with its 2y spread at 1538bp.
pub fn freddie() -> CdsCurve {
    entity(FREDDIE_CSV, "FRE")
}

/// Microsoft quotes from 3 December 2008 onwards, in date order.
pub fn msft_path() -> Vec<CdsCurve> {
    load(MSFT_PATH_CSV)
}

pub fn five_ten() -> (Tenor, Tenor) {
    (Tenor::CANONICAL[5], Tenor::CANONICAL[7])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        assert_eq!(msft().len(), 8);
        assert_eq!(aib().len(), 8);
        assert_eq!(freddie().len(), 5);
        let path = msft_path();
        assert_eq!(path.len(), 22);
        assert!(path.windows(2).all(|w| w[0].as_of() < w[1].as_of()));
        assert_eq!(path[0], msft());
    }
}
