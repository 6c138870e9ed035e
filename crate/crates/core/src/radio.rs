//! Link budget: log-distance path loss, sectorized antenna gain, noise-limited
//! SNR and Shannon rate for the mmW and µW bands.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::geometry::signed_angle;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    MmwLos,
    MmwNlos,
    Microwave,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    pub carrier_frequency: f64,
    pub reference_distance: f64,
    pub exponent: f64,
    /// Standard deviation of log-normal shadowing, dB.
    pub shadowing_std: f64,
    pub band: Band,
}

impl PathLossParams {
    pub fn new(
        carrier_frequency: f64,
        reference_distance: f64,
        exponent: f64,
        shadowing_std: f64,
        band: Band,
    ) -> Result<Self> {
        ensure(
            carrier_frequency > 0.0,
            "carrier_frequency",
            carrier_frequency,
            "carrier_frequency > 0",
        )?;
        ensure(
            reference_distance > 0.0,
            "reference_distance",
            reference_distance,
            "reference_distance > 0",
        )?;
        ensure(exponent > 0.0, "exponent", exponent, "exponent > 0")?;
        ensure(
            shadowing_std >= 0.0,
            "shadowing_std",
            shadowing_std,
            "shadowing_std >= 0",
        )?;
        Ok(PathLossParams {
            carrier_frequency,
            reference_distance,
            exponent,
            shadowing_std,
            band,
        })
    }

    /// 73 GHz E-band, line of sight.
    pub fn mmw_los() -> Self {
        PathLossParams {
            carrier_frequency: 73e9,
            reference_distance: 1.0,
            exponent: 2.0,
            shadowing_std: 4.0,
            band: Band::MmwLos,
        }
    }

    /// 73 GHz E-band, non line of sight.
    pub fn mmw_nlos() -> Self {
        PathLossParams {
            exponent: 3.5,
            shadowing_std: 7.0,
            band: Band::MmwNlos,
            ..Self::mmw_los()
        }
    }

    /// Sub-6 GHz control/coverage band.
    pub fn microwave() -> Self {
        PathLossParams {
            carrier_frequency: 2e9,
            reference_distance: 1.0,
            exponent: 3.5,
            shadowing_std: 4.0,
            band: Band::Microwave,
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    /// Free-space loss at the reference distance, dB.
    pub fn reference_loss_db(&self) -> f64 {
        20.0 * (4.0 * PI * self.reference_distance / self.wavelength()).log10()
    }

    /// `β = (λ / 4πr₀)² r₀^α`, the linear gain constant of the channel.
    pub fn beta(&self) -> f64 {
        let r0 = self.reference_distance;
        (self.wavelength() / (4.0 * PI * r0)).powi(2) * r0.powf(self.exponent)
    }

    fn check_distance(&self, distance: f64) -> Result<()> {
        ensure(
            distance >= self.reference_distance,
            "distance",
            distance,
            "distance >= reference_distance",
        )
    }
}

/// Large-scale loss in dB at `distance`, with the shadowing term supplied by
/// the caller (zero for deterministic analysis).
pub fn path_loss(distance: f64, params: &PathLossParams, shadowing_sample: f64) -> Result<f64> {
    params.check_distance(distance)?;
    Ok(params.reference_loss_db()
        + 10.0 * params.exponent * (distance / params.reference_distance).log10()
        + shadowing_sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub main_lobe_gain: f64,
    pub side_lobe_gain: f64,
    pub main_lobe_width: f64,
}

impl AntennaPattern {
    pub fn new(main_lobe_gain: f64, side_lobe_gain: f64, main_lobe_width: f64) -> Result<Self> {
        ensure(
            main_lobe_gain >= side_lobe_gain,
            "main_lobe_gain",
            main_lobe_gain,
            "main_lobe_gain >= side_lobe_gain",
        )?;
        ensure(
            main_lobe_width > 0.0 && main_lobe_width < 2.0 * PI,
            "main_lobe_width",
            main_lobe_width,
            "0 < main_lobe_width < 2π",
        )?;
        Ok(AntennaPattern {
            main_lobe_gain,
            side_lobe_gain,
            main_lobe_width,
        })
    }

    /// 18 dB main lobe, −2 dB side lobes, 10° main lobe.
    pub fn table_default() -> Self {
        AntennaPattern {
            main_lobe_gain: 18.0,
            side_lobe_gain: -2.0,
            main_lobe_width: 10f64.to_radians(),
        }
    }
}

/// Gain in dB at `offset_angle` from boresight. The main lobe applies only
/// strictly inside the main lobe width.
pub fn antenna_gain(offset_angle: f64, pattern: &AntennaPattern) -> f64 {
    if signed_angle(offset_angle).abs() < pattern.main_lobe_width {
        pattern.main_lobe_gain
    } else {
        pattern.side_lobe_gain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub bandwidth: f64,
    pub noise_psd_dbm_hz: f64,
    /// Overall transmit-receive gain ψ, linear.
    pub combined_gain: f64,
    /// Channel constant β, linear. Must come from the [`PathLossParams`] the
    /// budget is used with.
    pub beta: f64,
}

impl LinkBudget {
    pub fn new(
        tx_power_dbm: f64,
        bandwidth: f64,
        noise_psd_dbm_hz: f64,
        combined_gain_db: f64,
        channel: &PathLossParams,
    ) -> Result<Self> {
        ensure(bandwidth > 0.0, "bandwidth", bandwidth, "bandwidth > 0")?;
        ensure(tx_power_dbm.is_finite(), "tx_power_dbm", tx_power_dbm, "finite power")?;
        let beta = channel.beta();
        ensure(beta > 0.0, "beta", beta, "beta > 0")?;
        Ok(LinkBudget {
            tx_power_dbm,
            bandwidth,
            noise_psd_dbm_hz,
            combined_gain: db_to_linear(combined_gain_db),
            beta,
        })
    }

    /// 30 dBm, 5 GHz, −174 dBm/Hz, ψ = G_max² with G_max = 18 dB.
    pub fn mmw_table_default(channel: &PathLossParams) -> Self {
        Self::new(30.0, 5e9, -174.0, 36.0, channel).expect("table defaults are valid")
    }

    pub fn noise_power_watts(&self) -> f64 {
        dbm_to_watts(self.noise_psd_dbm_hz) * self.bandwidth
    }

    /// SNR without the distance term: `β P_t ψ / (w N₀)`.
    pub fn snr_constant(&self) -> f64 {
        self.beta * dbm_to_watts(self.tx_power_dbm) * self.combined_gain / self.noise_power_watts()
    }
}

/// Noise-limited SNR (linear) at `distance`.
pub fn snr(distance: f64, link: &LinkBudget, params: &PathLossParams) -> Result<f64> {
    params.check_distance(distance)?;
    Ok(link.snr_constant() * distance.powf(-params.exponent))
}

/// Shannon rate `w log₂(1 + snr)` in bit/s.
pub fn shannon_rate(bandwidth: f64, snr: f64) -> f64 {
    bandwidth * snr.ln_1p() / std::f64::consts::LN_2
}

pub fn instantaneous_rate(distance: f64, link: &LinkBudget, params: &PathLossParams) -> Result<f64> {
    Ok(shannon_rate(link.bandwidth, snr(distance, link, params)?))
}

/// Received power in dBm. `tx_gain` and `rx_gain` are in dB.
pub fn rss_dbm(
    distance: f64,
    link: &LinkBudget,
    params: &PathLossParams,
    shadowing_sample: f64,
    tx_gain: f64,
    rx_gain: f64,
) -> Result<f64> {
    Ok(link.tx_power_dbm + tx_gain + rx_gain - path_loss(distance, params, shadowing_sample)?)
}

/// Aggregate transmit-receive gain of one interfering mmW link, drawn from
/// the three sectorized combinations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceGainModel {
    /// Probability the interferer's main lobe points at the victim.
    pub tx_main_prob: f64,
    /// Probability the victim's main lobe points at the interferer.
    pub rx_main_prob: f64,
    pub pattern: AntennaPattern,
}

impl InterferenceGainModel {
    /// Main-lobe probabilities implied by the angular share of the lobes:
    /// `Nθ/2π` at the base station and `θ_m/2π` at the user.
    pub fn from_beams(n_beams: usize, beam_width: f64, pattern: AntennaPattern) -> Self {
        InterferenceGainModel {
            tx_main_prob: (n_beams as f64 * beam_width / (2.0 * PI)).min(1.0),
            rx_main_prob: (pattern.main_lobe_width / (2.0 * PI)).min(1.0),
            pattern,
        }
    }

    /// Maps two independent uniforms to a combined gain in dB.
    pub fn sample_db(&self, u_tx: f64, u_rx: f64) -> f64 {
        let tx = if u_tx < self.tx_main_prob {
            self.pattern.main_lobe_gain
        } else {
            self.pattern.side_lobe_gain
        };
        let rx = if u_rx < self.rx_main_prob {
            self.pattern.main_lobe_gain
        } else {
            self.pattern.side_lobe_gain
        };
        tx + rx
    }

    /// Probabilities of (G_max², G_max·G_min, G_min²).
    pub fn combination_probs(&self) -> [f64; 3] {
        let (pt, pr) = (self.tx_main_prob, self.rx_main_prob);
        [pt * pr, pt * (1.0 - pr) + (1.0 - pt) * pr, (1.0 - pt) * (1.0 - pr)]
    }
}
