//! Reference 9-R values, `[A, B, C, M, 1, M, D, B, E]` slot order.

use su3_lgt::Irrep;

pub fn reference() -> Vec<([Irrep; 9], f64)> {
    let one = Irrep::SINGLET;
    let t = Irrep::TRIPLET;
    let b = Irrep::ANTI_TRIPLET;
    let e = Irrep::OCTET;
    let s5 = 5f64.sqrt();
    vec![
        ([one, t, t, b, one, b, b, t, one], 1.0),
        ([one, t, t, b, one, b, b, t, e], 8.0),
        ([t, b, one, b, one, b, e, b, b], 2.0 * 2f64.sqrt()),
        ([t, b, one, t, one, t, b, b, t], 3f64.sqrt()),
        ([t, t, b, t, one, t, b, t, one], -1.0),
        ([t, t, b, t, one, t, b, t, e], 4.0),
        ([t, t, b, b, one, b, e, t, t], -(6f64.sqrt())),
        ([e, e, e, t, one, t, t, e, t], 0.75 * (s5 + 3.0)),
        ([e, e, e, b, one, b, b, e, b], 0.75 * (s5 - 3.0)),
    ]
}
