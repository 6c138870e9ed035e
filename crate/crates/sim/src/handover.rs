//! RSS filtering and the handover state machine.
//!
//! Timers run in whole simulation steps. A search every `T_s` looks for the
//! strongest measured small cell; if it beats the serving cell (or, when
//! the macro cell serves, the serving threshold) by the hysteresis, the
//! condition must then hold at every step for `ΔT` before the handover
//! is triggered and, after the execution delay, completed. With caching on,
//! searching is muted while the cache holds more than `ΔT` of playback.

use std::fmt;

use serde::Serialize;

use crate::config::{HandoverParams, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CellId {
    Macro,
    Small(usize),
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellId::Macro => f.write_str("mbs"),
            CellId::Small(k) => write!(f, "sbs{k}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Track {
    sbs: usize,
    ring: Vec<f64>,
    head: usize,
    len: usize,
}

impl Track {
    fn mean(&self) -> f64 {
        self.ring[..self.len].iter().sum::<f64>() / self.len as f64
    }
}

/// Moving average of RSS samples (dB) per measured small cell.
#[derive(Debug, Clone)]
pub struct RssFilter {
    window: usize,
    tracks: Vec<Track>,
}

impl RssFilter {
    pub fn new(window: usize) -> Self {
        RssFilter {
            window: window.max(1),
            tracks: Vec::new(),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn clear(&mut self) {
        self.tracks.clear();
    }

    /// Pushes one sample per measured cell. `samples` must be sorted by cell
    /// index; cells missing from it lose their history.
    pub fn update(&mut self, samples: &[(usize, f64)]) {
        let window = self.window;
        let mut old = std::mem::take(&mut self.tracks).into_iter().peekable();
        for &(sbs, rss) in samples {
            while old.peek().is_some_and(|t| t.sbs < sbs) {
                old.next();
            }
            let mut track = match old.peek() {
                Some(t) if t.sbs == sbs => old.next().expect("peeked"),
                _ => Track {
                    sbs,
                    ring: vec![0.0; window],
                    head: 0,
                    len: 0,
                },
            };
            track.ring[track.head] = rss;
            track.head = (track.head + 1) % window;
            track.len = (track.len + 1).min(window);
            self.tracks.push(track);
        }
    }

    /// Filtered RSS of `sbs` and whether its window is full.
    pub fn filtered(&self, sbs: usize) -> Option<(f64, bool)> {
        self.tracks
            .binary_search_by_key(&sbs, |t| t.sbs)
            .ok()
            .map(|i| {
                let t = &self.tracks[i];
                (t.mean(), t.len == self.window)
            })
    }

    /// Strongest fully filtered cell other than `exclude`.
    pub fn strongest(&self, exclude: Option<usize>) -> Option<(usize, f64)> {
        self.tracks
            .iter()
            .filter(|t| t.len == self.window && Some(t.sbs) != exclude)
            .map(|t| (t.sbs, t.mean()))
            .fold(None, |best: Option<(usize, f64)>, c| match best {
                Some(b) if b.1 >= c.1 => Some(b),
                _ => Some(c),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HoState {
    Searching,
    TttPending { candidate: usize, elapsed_steps: u64 },
    Executing { target: usize, remaining_steps: u64 },
    Muted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    TttStart,
    TttAbort,
    HoTrigger,
    HoComplete,
    Hof,
    LinkLoss,
    Mute,
    Unmute,
    Respawn,
    BeamEnter,
    BeamExit,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::TttStart => "ttt_start",
            EventKind::TttAbort => "ttt_abort",
            EventKind::HoTrigger => "ho_trigger",
            EventKind::HoComplete => "ho_complete",
            EventKind::Hof => "hof",
            EventKind::LinkLoss => "link_loss",
            EventKind::Mute => "mute",
            EventKind::Unmute => "unmute",
            EventKind::Respawn => "respawn",
            EventKind::BeamEnter => "beam_enter",
            EventKind::BeamExit => "beam_exit",
        };
        f.write_str(s)
    }
}

/// Timer lengths in steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepTimers {
    pub search: u64,
    pub ttt: u64,
    pub execution: u64,
    pub filter_window: usize,
}

impl StepTimers {
    pub fn from_config(config: &SimConfig) -> Self {
        let steps = |s: f64| (s / config.dt).round() as u64;
        let h = &config.handover;
        StepTimers {
            search: steps(h.search_period).max(1),
            ttt: steps(h.ttt),
            execution: steps(h.execution_time),
            filter_window: steps(h.filter_window).max(1) as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoStateMachine {
    pub state: HoState,
    pub serving: CellId,
    /// Steps since the serving small cell was entered.
    pub cell_steps: u64,
    /// Whether the serving cell was entered through a handover, which makes
    /// its exit subject to the minimum time of stay.
    pub entered_via_ho: bool,
    search_countdown: u64,
    timers: StepTimers,
    params: HandoverParams,
    dt: f64,
}

impl HoStateMachine {
    pub fn new(serving: CellId, timers: StepTimers, params: HandoverParams, dt: f64) -> Self {
        HoStateMachine {
            state: HoState::Searching,
            serving,
            cell_steps: 0,
            entered_via_ho: false,
            search_countdown: timers.search,
            timers,
            params,
            dt,
        }
    }

    /// Time since the serving small cell was entered, seconds.
    pub fn time_in_cell(&self) -> f64 {
        self.cell_steps as f64 * self.dt
    }

    pub fn candidate(&self) -> Option<usize> {
        match self.state {
            HoState::TttPending { candidate, .. } => Some(candidate),
            HoState::Executing { target, .. } => Some(target),
            _ => None,
        }
    }

    pub fn ttt_elapsed(&self) -> f64 {
        match self.state {
            HoState::TttPending { elapsed_steps, .. } => elapsed_steps as f64 * self.dt,
            _ => 0.0,
        }
    }

    pub fn serving_small(&self) -> Option<usize> {
        match self.serving {
            CellId::Small(k) => Some(k),
            CellId::Macro => None,
        }
    }

    /// Restarts at `serving` without counting an exit, as after a respawn.
    pub fn reset(&mut self, serving: CellId) {
        *self = HoStateMachine::new(serving, self.timers, self.params, self.dt);
    }

    pub fn advance_clock(&mut self) {
        if self.serving != CellId::Macro {
            self.cell_steps += 1;
        }
    }

    fn leave_cell(&mut self, out: &mut Vec<(EventKind, CellId, f64)>) -> Option<f64> {
        let stay = match self.serving {
            CellId::Small(_) if self.entered_via_ho => {
                let stay = self.time_in_cell();
                if stay < self.params.mts {
                    out.push((EventKind::Hof, self.serving, stay));
                }
                Some(stay)
            }
            _ => None,
        };
        self.cell_steps = 0;
        self.entered_via_ho = false;
        stay
    }

    /// Falls back to the macro cell when the serving small cell is no longer
    /// measured or its full-window RSS is below the serving threshold.
    /// Returns the time of stay of a handover-entered cell that was left.
    pub fn check_link(&mut self, filter: &RssFilter, out: &mut Vec<(EventKind, CellId, f64)>) -> Option<f64> {
        let CellId::Small(k) = self.serving else {
            return None;
        };
        let lost = match filter.filtered(k) {
            None => true,
            Some((rss, full)) => full && rss < self.params.serving_threshold_dbm,
        };
        if !lost {
            return None;
        }
        let rss = filter.filtered(k).map_or(f64::NEG_INFINITY, |f| f.0);
        out.push((EventKind::LinkLoss, self.serving, rss));
        let stay = self.leave_cell(out);
        self.serving = CellId::Macro;
        stay
    }

    fn condition_holds(&self, filter: &RssFilter, candidate: usize) -> bool {
        let Some((target, true)) = filter.filtered(candidate) else {
            return false;
        };
        match self.serving {
            CellId::Macro => target >= self.params.serving_threshold_dbm + self.params.hysteresis_db,
            CellId::Small(k) if k == candidate => false,
            CellId::Small(k) => {
                let serving = filter.filtered(k).map_or(f64::NEG_INFINITY, |f| f.0);
                target > serving + self.params.hysteresis_db
            }
        }
    }

    /// One step of the protocol. `mute` is the caching rule's verdict for
    /// this step. Returns the time of stay of a handover-entered cell left
    /// by a completed handover.
    pub fn tick(
        &mut self,
        filter: &RssFilter,
        mute: bool,
        cache_bits: f64,
        out: &mut Vec<(EventKind, CellId, f64)>,
    ) -> Option<f64> {
        match self.state {
            HoState::Executing {
                target,
                remaining_steps,
            } => {
                if remaining_steps > 1 {
                    self.state = HoState::Executing {
                        target,
                        remaining_steps: remaining_steps - 1,
                    };
                    return None;
                }
                let stay = self.leave_cell(out);
                self.serving = CellId::Small(target);
                self.entered_via_ho = true;
                let rss = filter.filtered(target).map_or(f64::NEG_INFINITY, |f| f.0);
                out.push((EventKind::HoComplete, self.serving, rss));
                self.search_countdown = self.timers.search;
                if mute {
                    self.state = HoState::Muted;
                    out.push((EventKind::Mute, self.serving, cache_bits));
                } else {
                    self.state = HoState::Searching;
                }
                stay
            }
            HoState::Muted => {
                if !mute {
                    out.push((EventKind::Unmute, self.serving, cache_bits));
                    self.state = HoState::Searching;
                    self.search_countdown = 1;
                    self.search(filter, out);
                }
                None
            }
            HoState::Searching => {
                if mute {
                    self.state = HoState::Muted;
                    out.push((EventKind::Mute, self.serving, cache_bits));
                } else {
                    self.search(filter, out);
                }
                None
            }
            HoState::TttPending {
                candidate,
                elapsed_steps,
            } => {
                if mute {
                    self.state = HoState::Muted;
                    out.push((EventKind::Mute, self.serving, cache_bits));
                } else if self.condition_holds(filter, candidate) {
                    let elapsed_steps = elapsed_steps + 1;
                    if elapsed_steps >= self.timers.ttt {
                        self.trigger(filter, candidate, out);
                    } else {
                        self.state = HoState::TttPending {
                            candidate,
                            elapsed_steps,
                        };
                    }
                } else {
                    let rss = filter.filtered(candidate).map_or(f64::NEG_INFINITY, |f| f.0);
                    out.push((EventKind::TttAbort, CellId::Small(candidate), rss));
                    self.state = HoState::Searching;
                }
                None
            }
        }
    }

    fn search(&mut self, filter: &RssFilter, out: &mut Vec<(EventKind, CellId, f64)>) {
        self.search_countdown -= 1;
        if self.search_countdown > 0 {
            return;
        }
        self.search_countdown = self.timers.search;
        let Some((candidate, rss)) = filter.strongest(self.serving_small()) else {
            return;
        };
        if !self.condition_holds(filter, candidate) {
            return;
        }
        out.push((EventKind::TttStart, CellId::Small(candidate), rss));
        if self.timers.ttt == 0 {
            self.trigger(filter, candidate, out);
        } else {
            self.state = HoState::TttPending {
                candidate,
                elapsed_steps: 0,
            };
        }
    }

    fn trigger(&mut self, filter: &RssFilter, candidate: usize, out: &mut Vec<(EventKind, CellId, f64)>) {
        let rss = filter.filtered(candidate).map_or(f64::NEG_INFINITY, |f| f.0);
        out.push((EventKind::HoTrigger, CellId::Small(candidate), rss));
        self.state = HoState::Executing {
            target: candidate,
            remaining_steps: self.timers.execution.max(1),
        };
    }
}
