//! Trade-sign inference from quote midpoints.
//!
//! On the trade scale a sign is the direction of the midpoint change and is
//! carried forward when the midpoint does not move. On the physical scale a
//! second's sign is the sign of the sum of its trade signs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timescales::SecondSample;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignError {
    #[error("slot counts cover {slots} events but {signs} trade signs were given")]
    Misaligned { slots: u64, signs: usize },
}

/// Signs aligned with trade events. `0` marks an undefined entry, which can
/// only occur in the leading run before the first midpoint change.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignSeriesTrade {
    signs: Vec<i8>,
}

impl SignSeriesTrade {
    pub fn as_slice(&self) -> &[i8] {
        &self.signs
    }

    pub fn get(&self, n: usize) -> Option<i8> {
        self.signs.get(n).copied().filter(|s| *s != 0)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Length of the undefined prefix.
    pub fn n_undefined(&self) -> usize {
        self.signs.iter().take_while(|s| **s == 0).count()
    }

    /// Every defined sign negated.
    pub fn negated(&self) -> Self {
        SignSeriesTrade {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }
}

impl From<SignSeriesTrade> for Vec<i8> {
    fn from(s: SignSeriesTrade) -> Self {
        s.signs
    }
}

pub fn classify_trade_scale(midpoints: &[f64]) -> SignSeriesTrade {
    let mut signs = Vec::with_capacity(midpoints.len());
    let mut last = 0i8;
    let mut prev: Option<f64> = None;
    for &m in midpoints {
        if let Some(p) = prev {
            if m > p {
                last = 1;
            } else if m < p {
                last = -1;
            }
        }
        signs.push(last);
        prev = Some(m);
    }
    SignSeriesTrade { signs }
}

/// Per-second signs in `{-1, 0, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignSeriesPhysical {
    signs: Vec<i8>,
}

impl SignSeriesPhysical {
    pub fn as_slice(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Copies the signs into `samples` (same length expected).
    pub fn apply_to(&self, samples: &mut [SecondSample]) {
        for (s, &sign) in samples.iter_mut().zip(&self.signs) {
            s.sign = sign;
        }
    }
}

/// Why seconds ended up with sign 0, plus the trade-scale undefined count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignDiagnostics {
    pub undefined_trade_signs: u64,
    pub seconds_buy: u64,
    pub seconds_sell: u64,
    pub zero_no_trades: u64,
    pub zero_balance: u64,
    pub zero_undefined_only: u64,
}

impl SignDiagnostics {
    pub fn merge(&mut self, o: &SignDiagnostics) {
        self.undefined_trade_signs += o.undefined_trade_signs;
        self.seconds_buy += o.seconds_buy;
        self.seconds_sell += o.seconds_sell;
        self.zero_no_trades += o.zero_no_trades;
        self.zero_balance += o.zero_balance;
        self.zero_undefined_only += o.zero_undefined_only;
    }
}

/// Nets the trade signs of each second. `slot_counts[k]` is the number of
/// consecutive trade events that fall into second `k`.
///
/// Undefined trade signs are skipped in the sum; a second holding only
/// undefined signs is emitted as 0 and tallied in `zero_undefined_only`.
pub fn classify_physical_scale(
    trade_signs: &SignSeriesTrade,
    slot_counts: &[u32],
) -> Result<(SignSeriesPhysical, SignDiagnostics), SignError> {
    let total: u64 = slot_counts.iter().map(|&c| u64::from(c)).sum();
    if total != trade_signs.len() as u64 {
        return Err(SignError::Misaligned {
            slots: total,
            signs: trade_signs.len(),
        });
    }
    let mut diag = SignDiagnostics {
        undefined_trade_signs: trade_signs.n_undefined() as u64,
        ..Default::default()
    };
    let mut signs = Vec::with_capacity(slot_counts.len());
    let mut pos = 0usize;
    for &count in slot_counts {
        let chunk = &trade_signs.signs[pos..pos + count as usize];
        pos += count as usize;
        let sign = if chunk.is_empty() {
            diag.zero_no_trades += 1;
            0
        } else if chunk.iter().all(|s| *s == 0) {
            diag.zero_undefined_only += 1;
            0
        } else {
            let net: i64 = chunk.iter().map(|&s| i64::from(s)).sum();
            match net.signum() {
                1 => diag.seconds_buy += 1,
                -1 => diag.seconds_sell += 1,
                _ => diag.zero_balance += 1,
            }
            net.signum() as i8
        };
        signs.push(sign);
    }
    Ok((SignSeriesPhysical { signs }, diag))
}
