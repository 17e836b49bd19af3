//! Reading and writing Matrix Market files.

use decaycert::generators::gen_damped_wave;
use decaycert::mtx::{load_matrix, parse_matrix_market, save_matrix};

const HERMITIAN: &str = "%%MatrixMarket matrix coordinate complex hermitian
% lower triangle only; the reader mirrors it
2 2 3
1 1 2.0 0.0
2 1 0.5 -1.0
2 2 3.0 0.0
";

fn main() -> decaycert::Result<()> {
    let m = parse_matrix_market(HERMITIAN.as_bytes())?;
    println!("expanded hermitian matrix:{m}");
    assert_eq!(m, m.adjoint());

    let pair = gen_damped_wave(4, 0.3, 1.0)?;
    let dir = std::env::temp_dir().join("decaycert-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("A.mtx");
    save_matrix(pair.stiffness(), &path)?;
    let back = load_matrix(&path)?;
    println!("round trip through {} is exact: {}", path.display(), &back == pair.stiffness());

    match parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n".as_bytes()) {
        Err(e) => println!("pattern file rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
