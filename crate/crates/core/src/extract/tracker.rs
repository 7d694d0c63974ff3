//! Minimal candidate selection for frames with several blobs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Detection;
use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub frame_index: u64,
    pub position: Point2,
}

/// Picks one candidate for `frame_index`.
///
/// With two or more history points the candidate nearest the constant-velocity
/// extrapolation of the last two wins, provided it lies within `gate_radius`.
/// With less history the most confident candidate wins.
pub fn track_select(
    candidates: &[Detection],
    history: &[TrackPoint],
    frame_index: u64,
    gate_radius: f64,
) -> Option<Detection> {
    if let [.., prev, last] = history {
        let predicted = extrapolate(prev, last, frame_index);
        return candidates
            .iter()
            .map(|c| (c.position().distance(predicted), c))
            .filter(|(d, _)| *d <= gate_radius)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, c)| *c);
    }
    candidates
        .iter()
        .max_by(|a, b| {
            a.confidence
                .total_cmp(&b.confidence)
                // earlier candidates win ties
                .then(std::cmp::Ordering::Greater)
        })
        .copied()
}

fn extrapolate(prev: &TrackPoint, last: &TrackPoint, frame_index: u64) -> Point2 {
    let span = last.frame_index as f64 - prev.frame_index as f64;
    if span <= 0.0 {
        return last.position;
    }
    let velocity = (last.position - prev.position) * (1.0 / span);
    let ahead = frame_index as f64 - last.frame_index as f64;
    last.position + velocity * ahead
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub gate_radius: f64,
    /// Consecutive frames without a selection after which history is dropped.
    pub max_misses: u32,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            gate_radius: 50.0,
            max_misses: 2,
        }
    }
}

/// Per-clip selection state. One writer per clip.
#[derive(Debug, Clone, Default)]
pub struct Tracker {
    config: TrackerConfig,
    history: VecDeque<TrackPoint>,
    misses: u32,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Self {
        Self {
            config,
            history: VecDeque::with_capacity(2),
            misses: 0,
        }
    }

    pub fn history(&self) -> Vec<TrackPoint> {
        self.history.iter().copied().collect()
    }

    pub fn reset(&mut self) {
        self.history.clear();
        self.misses = 0;
    }

    pub fn update(&mut self, frame_index: u64, candidates: &[Detection]) -> Option<Detection> {
        let history: Vec<_> = self.history.iter().copied().collect();
        let chosen = track_select(candidates, &history, frame_index, self.config.gate_radius);
        match chosen {
            Some(det) => {
                if self.history.len() == 2 {
                    self.history.pop_front();
                }
                self.history.push_back(TrackPoint {
                    frame_index,
                    position: det.position(),
                });
                self.misses = 0;
            }
            None => {
                self.misses += 1;
                if self.misses >= self.config.max_misses {
                    self.reset();
                }
            }
        }
        chosen
    }
}
