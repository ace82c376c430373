//! Benchmark fixtures shared by the criterion benches.

use sftlab_core::patterns::{Alphabet, Pattern, SftSpec};

/// Hard-square model restricted to an extra forbidden diagonal, a moderately
/// constrained 2D instance for enumeration benches.
pub fn diagonal_hard_squares() -> SftSpec {
    let mut forbidden = SftSpec::golden_mean(2).forbidden().to_vec();
    forbidden.push(
        Pattern::from_cells(
            2,
            [
                (sftlab_core::Site::new(vec![0, 0]), 1),
                (sftlab_core::Site::new(vec![1, 1]), 1),
            ],
        )
        .expect("nonempty"),
    );
    SftSpec::new(Alphabet::numbered(2), 2, forbidden).expect("valid")
}
