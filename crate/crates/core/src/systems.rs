//! Reference systems whose measures are known in closed form.

use crate::discrete::{joint_from_transition, DiscreteJoint, TransitionKernel};
use crate::error::Result;

/// Uniform `x`, `y = x` exactly.
pub fn copy_system(n: usize) -> Result<DiscreteJoint> {
    let states = 1 << n;
    joint_from_transition(
        &vec![1.0 / states as f64; states],
        &TransitionKernel::identity(n)?,
    )
}

/// Uniform two-element `x` with crossed wiring `y_1 = x_2`, `y_2 = x_1`.
pub fn swap_system() -> Result<DiscreteJoint> {
    let kernel = TransitionKernel::from_fn(2, |x, y| {
        let swapped = ((x & 1) << 1) | (x >> 1);
        if y == swapped {
            1.0
        } else {
            0.0
        }
    })?;
    joint_from_transition(&[0.25; 4], &kernel)
}

/// Uniform `x` independent of `y`, with `y_1 = y_2` a shared fair coin.
pub fn shared_noise_system() -> Result<DiscreteJoint> {
    let kernel = TransitionKernel::from_fn(2, |_, y| match y {
        0b00 | 0b11 => 0.5,
        _ => 0.0,
    })?;
    joint_from_transition(&[0.25; 4], &kernel)
}

/// Each `y_i` is a noisy copy of `x_i`, flipped with probability `flip`,
/// under an arbitrary prior on `x`.
pub fn noisy_copy_system(prior: &[f64], n: usize, flip: f64) -> Result<DiscreteJoint> {
    joint_from_transition(prior, &TransitionKernel::independent_flips(n, flip)?)
}
