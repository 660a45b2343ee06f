fn main() {
    // system OpenBLAS provides both the CBLAS and LAPACK symbols
    println!("cargo:rustc-link-lib=openblas");
}
