//! Spin reference frames.
//!
//! Spin directions can be expressed either in one common laboratory basis or
//! in the per-event helicity triad `(n̂, r̂, k̂)` built from the production
//! kinematics:
//!
//! * `k̂` — flight direction of the positively charged fermion in the
//!   center-of-mass frame,
//! * `r̂` — in the production plane, orthogonal to `k̂`, with positive
//!   component along the beam,
//! * `n̂ = r̂ × k̂` — normal to the production plane.
//!
//! With the beam along `ẑ` and the production plane fixed to the x–z plane
//! (the azimuth is unobservable for unpolarized beams, so we set it to zero
//! throughout), the triad at scattering angle `Θ` reads
//!
//! ```text
//! k̂ = ( sinΘ, 0, cosΘ),   r̂ = (−cosΘ, 0, sinΘ),   n̂ = (0, 1, 0).
//! ```
//!
//! Averaging density matrices written in per-event triads produces a
//! "fictitious" state that differs from the average of the same matrices
//! written in one fixed basis; both modes are supported and the difference is
//! physically meaningful, so the frame choice travels with every generated
//! dataset.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

/// Which basis spin components refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    /// One common laboratory basis `(x̂, ŷ, ẑ)` shared by all events.
    FixedLab,
    /// The per-event helicity triad `(n̂, r̂, k̂)`.
    Helicity,
}

impl Frame {
    /// Stable lowercase name used in files and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::FixedLab => "fixed-lab",
            Frame::Helicity => "helicity",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Frame {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed-lab" => Ok(Frame::FixedLab),
            "helicity" => Ok(Frame::Helicity),
            other => Err(format!(
                "unknown frame `{other}` (expected `fixed-lab` or `helicity`)"
            )),
        }
    }
}

/// Rotation taking helicity-triad components to lab components at the given
/// scattering angle: the columns are `(n̂, r̂, k̂)` expressed in the lab basis.
///
/// The matrix is a proper rotation (`det = +1`) for every `cosΘ ∈ [−1, 1]`,
/// including the endpoints, because the production plane is pinned to x–z.
pub fn helicity_rotation(cos_theta: f64) -> Matrix3<f64> {
    let c = cos_theta;
    let s = (1.0 - c * c).max(0.0).sqrt();
    Matrix3::new(
        0.0, -c, s, //
        1.0, 0.0, 0.0, //
        0.0, s, c,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_names_round_trip() {
        for frame in [Frame::FixedLab, Frame::Helicity] {
            assert_eq!(frame.as_str().parse::<Frame>().unwrap(), frame);
        }
        assert!("sideways".parse::<Frame>().is_err());
    }

    #[test]
    fn helicity_rotation_is_proper_orthogonal() {
        for k in 0..=40 {
            let c = -1.0 + 0.05 * k as f64;
            let r = helicity_rotation(c);
            let should_be_identity = r.transpose() * r;
            assert!((should_be_identity - Matrix3::identity()).norm() < 1e-14);
            assert!((r.determinant() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn triad_matches_closed_form() {
        let r = helicity_rotation(0.0); // Θ = π/2
                                        // n̂ = ŷ, r̂ = (0,0,1) + (−0,..) = (−0,0,1) → here cos=0: r̂=(0,0,1), k̂=(1,0,0)
        assert!((r.column(0) - nalgebra::Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((r.column(1) - nalgebra::Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
        assert!((r.column(2) - nalgebra::Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
    }
}
