//! Fixed workloads shared by the benchmarks.

use frictionlab_core::{FormFactorModel, ModeGrid, RadialGrid, XiGrid};

pub fn model(mu: f64, g: f64) -> FormFactorModel {
    FormFactorModel::gaussian(mu, g)
}

/// Classical grid with `nk × (2·half + 1)` nodes.
pub fn classical_grid(nk: usize, half: usize) -> ModeGrid {
    ModeGrid::new(
        RadialGrid::uniform(4.0, nk).expect("valid k grid"),
        XiGrid::uniform(4.0, half).expect("valid xi grid"),
    )
}

/// Small Fock grid: 40 modes.
pub fn fock_grid() -> ModeGrid {
    ModeGrid::new(
        RadialGrid::uniform(4.0, 8).expect("valid k grid"),
        XiGrid::uniform(2.0, 2).expect("valid xi grid"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(classical_grid(10, 5).len(), 110);
        assert_eq!(fock_grid().len(), 40);
    }
}
