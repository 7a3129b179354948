//! Built-in defaults and named presets, written in the config format.

use clap::ValueEnum;
use toa_core::presets::{
    cesium_rabi_ratio, desk_grid, CESIUM_DX, CESIUM_V0, CESIUM_WIDE_DY, CESIUM_X0, DESK_DX,
    DESK_DY, DESK_GAMMA, DESK_KX0, DESK_MASS, DESK_X0, NARROW_DY_LADDER, OBLIQUE_RATIOS,
};
use toa_core::toa::{DEFAULT_N_KX, DEFAULT_N_KY};
use toa_core::PhysParams;

use crate::config::Layer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Normal incidence, transverse widths from 1 µm down to 0.02 nm.
    Fig2,
    /// Oblique incidence with v_y > 0, plain and Doppler-compensated.
    Fig3,
    /// Oblique incidence with v_y < 0, plain and Doppler-compensated.
    Fig4,
    /// Reflection probabilities against v_y.
    Fig5,
    /// Scaled parameters small enough for the grid oracle.
    Desk,
}

fn list(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| format!("{v:e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Caesium, normal incidence, wide transverse profile, 0 to 60 µs.
pub fn defaults() -> Layer {
    let cs = PhysParams::cesium();
    let text = format!(
        "[params]
mass = {:e}
rabi = {:e}
gamma = {:e}
laser_detuning = {:e}
laser_wavenumber = {:e}
[packet]
x0 = {CESIUM_X0:e}
y0 = 0
dx = {CESIUM_DX:e}
dy = {CESIUM_WIDE_DY:e}
vx0 = {CESIUM_V0:e}
ky0 = 0
[quadrature]
n_kx = {DEFAULT_N_KX}
n_ky = {DEFAULT_N_KY}
span_sigmas = 6
t_start = 0
t_end = 60e-6
n_times = 1201
allow_truncation = false
[run]
model = 2d
[scan]
vy_min = -30
vy_max = 30
n_vy = 61
[deconv]
input =
epsilon = 1e-4
",
        cs.mass, cs.rabi, cs.gamma, cs.laser_detuning, cs.laser_wavenumber
    );
    Layer::parse_text(&text, "defaults").expect("built-in defaults parse")
}

pub fn layer(preset: Preset) -> Layer {
    let oblique = |sign: f64| {
        format!(
            "[family]\nvy = {}\ncompensate = true\n",
            list(OBLIQUE_RATIOS.iter().map(|r| sign * r * CESIUM_V0))
        )
    };
    let text = match preset {
        Preset::Fig2 => format!(
            "[family]\ndy = {}\ncompensate = false\n",
            list(std::iter::once(CESIUM_WIDE_DY).chain(NARROW_DY_LADDER))
        ),
        Preset::Fig3 => oblique(1.0),
        Preset::Fig4 => oblique(-1.0),
        Preset::Fig5 => "[scan]\nvy_min = -1000\nvy_max = 1000\nn_vy = 2001\n".to_owned(),
        Preset::Desk => {
            let g = desk_grid();
            let rabi = cesium_rabi_ratio() * DESK_GAMMA;
            let k_l = toa_core::physparams::CESIUM_D2_WAVENUMBER * CESIUM_DX / DESK_DX;
            format!(
                "[params]
mass = {DESK_MASS:e}
rabi = {rabi:e}
gamma = {DESK_GAMMA:e}
laser_detuning = 0
laser_wavenumber = {k_l:e}
[packet]
x0 = {DESK_X0:e}
dx = {DESK_DX:e}
dy = {DESK_DY:e}
kx0 = {DESK_KX0:e}
[quadrature]
t_end = {:e}
n_times = 801
[family]
dy = {DESK_DY:e}
[grid]
x_min = {:e}
x_max = {:e}
y_min = {:e}
y_max = {:e}
n_x = {}
n_y = {}
dt = {:e}
n_steps = {}
monitor_every = 100
output_every = 4
",
                g.dt * g.n_steps as f64,
                g.x_min,
                g.x_max,
                g.y_min,
                g.y_max,
                g.n_x,
                g.n_y,
                g.dt,
                g.n_steps
            )
        }
    };
    Layer::parse_text(&text, &format!("preset {preset:?}")).expect("built-in preset parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        defaults();
        for p in Preset::value_variants() {
            layer(*p);
        }
    }
}
