fn main() {
    if let Err(e) = mmp_core::cli_main() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
