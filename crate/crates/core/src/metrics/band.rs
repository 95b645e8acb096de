use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Analysis band: broadband or one of the six octave bands (125 Hz to 4 kHz).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OctaveBand {
    #[serde(rename = "broadband")]
    Broadband,
    #[serde(rename = "125")]
    Hz125,
    #[serde(rename = "250")]
    Hz250,
    #[serde(rename = "500")]
    Hz500,
    #[serde(rename = "1000")]
    Hz1000,
    #[serde(rename = "2000")]
    Hz2000,
    #[serde(rename = "4000")]
    Hz4000,
}

impl OctaveBand {
    /// Broadband first, then the octaves in ascending order.
    pub const ALL: [OctaveBand; 7] = [
        OctaveBand::Broadband,
        OctaveBand::Hz125,
        OctaveBand::Hz250,
        OctaveBand::Hz500,
        OctaveBand::Hz1000,
        OctaveBand::Hz2000,
        OctaveBand::Hz4000,
    ];

    pub const OCTAVES: [OctaveBand; 6] = [
        OctaveBand::Hz125,
        OctaveBand::Hz250,
        OctaveBand::Hz500,
        OctaveBand::Hz1000,
        OctaveBand::Hz2000,
        OctaveBand::Hz4000,
    ];

    pub fn center_hz(self) -> Option<f64> {
        match self {
            OctaveBand::Broadband => None,
            OctaveBand::Hz125 => Some(125.0),
            OctaveBand::Hz250 => Some(250.0),
            OctaveBand::Hz500 => Some(500.0),
            OctaveBand::Hz1000 => Some(1000.0),
            OctaveBand::Hz2000 => Some(2000.0),
            OctaveBand::Hz4000 => Some(4000.0),
        }
    }

    /// Base-2 octave edges `fc / sqrt(2)` and `fc * sqrt(2)`.
    pub fn edges_hz(self) -> Option<(f64, f64)> {
        self.center_hz()
            .map(|fc| (fc * std::f64::consts::FRAC_1_SQRT_2, fc * std::f64::consts::SQRT_2))
    }

    /// Whether this band can be analysed at `sample_rate_hz` (upper edge below Nyquist).
    pub fn fits(self, sample_rate_hz: u32) -> bool {
        match self.edges_hz() {
            None => true,
            Some((_, hi)) => hi < f64::from(sample_rate_hz) / 2.0,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            OctaveBand::Broadband => "broadband",
            OctaveBand::Hz125 => "125",
            OctaveBand::Hz250 => "250",
            OctaveBand::Hz500 => "500",
            OctaveBand::Hz1000 => "1000",
            OctaveBand::Hz2000 => "2000",
            OctaveBand::Hz4000 => "4000",
        }
    }

    /// Column heading used in the printed Task-1 table.
    pub fn column_label(self) -> &'static str {
        match self {
            OctaveBand::Broadband => "Full",
            OctaveBand::Hz125 => "125",
            OctaveBand::Hz250 => "250",
            OctaveBand::Hz500 => "500",
            OctaveBand::Hz1000 => "1k",
            OctaveBand::Hz2000 => "2k",
            OctaveBand::Hz4000 => "4k",
        }
    }
}

impl fmt::Display for OctaveBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for OctaveBand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OctaveBand::ALL
            .into_iter()
            .find(|b| b.key() == s || b.column_label() == s)
            .ok_or_else(|| format!("unknown band {s:?}"))
    }
}
