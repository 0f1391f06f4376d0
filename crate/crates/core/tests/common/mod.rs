#![allow(dead_code)]

pub const CELLS: [usize; 8] = [10, 20, 40, 80, 160, 320, 640, 1280];

/// Measured l-infinity midpoint errors, `(kb = 2, kb = 1)` per row of `CELLS`.
pub const TABLE_U01: [(f64, f64); 8] = [
    (0.0025305, 0.00833660625),
    (0.0008281875, 0.00491559140625),
    (0.0002314921875, 0.00262908841699),
    (0.0000609287109375, 0.0013994637865),
    (0.0000156141357422, 0.000720704311203),
    (0.00000397348640443, 0.000365563075521),
    (0.00000100290833469, 0.00018408024467),
    (0.000000251919175326, 0.0000923642961781),
];

pub const TABLE_U02: [(f64, f64); 8] = [
    (0.00280385837572, 0.0102978586289),
    (0.000825428449649, 0.00578352637669),
    (0.000252680165957, 0.00308529222599),
    (0.0000781474537246, 0.00161972927959),
    (0.0000236164563317, 0.000828965994226),
    (0.00000711489098145, 0.000419239010994),
    (0.00000213591643874, 0.000210806199835),
    (0.000000643052172999, 0.000105699491246),
];

pub const TABLE_U03: [(f64, f64); 8] = [
    (0.00284239926561, 0.0108072887024),
    (0.00091837995271, 0.00600083229228),
    (0.000301806292425, 0.00319976806911),
    (0.0000975906472619, 0.00167418222795),
    (0.0000308167600202, 0.000855523358729),
    (0.00000972494981438, 0.00043235384157),
    (0.00000308448727156, 0.000217323081725),
    (0.000000971185766911, 0.000108947852591),
];

/// `(J, rho kb=1, norm kb=1, rho kb=2, norm kb=2)`.
pub const TABLE_SPECTRAL: [(usize, f64, f64, f64, f64); 4] = [
    (20, 0.7100, 0.9999, 0.7098, 1.0035),
    (80, 0.74300, 0.9999, 0.7513, 1.0035),
    (320, 0.9208, 0.9999, 0.9212, 1.0035),
    (1280, 0.9817, 0.9999, 0.9805, 1.0035),
];

pub fn table(datum: &str) -> &'static [(f64, f64); 8] {
    match datum {
        "u01" => &TABLE_U01,
        "u02" => &TABLE_U02,
        "u03" => &TABLE_U03,
        _ => panic!("no table for {datum}"),
    }
}

pub fn column(datum: &str, kb: usize) -> Vec<f64> {
    table(datum).iter().map(|&(k2, k1)| if kb == 2 { k2 } else { k1 }).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
