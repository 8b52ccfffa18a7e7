//! Sylvester-ordered Walsh-Hadamard basis.

/// Entry `H[k][p]` of the natural-order Sylvester matrix.
pub fn entry(k: usize, p: usize) -> f64 {
    if (k & p).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// In-place unnormalized fast Walsh-Hadamard transform. Length must be a
/// power of two; applying it twice multiplies by the length.
pub fn fwht(data: &mut [f64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fwht length {n} is not a power of two");
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (data[i], data[i + h]);
                data[i] = x + y;
                data[i + h] = x - y;
            }
        }
        h *= 2;
    }
}
