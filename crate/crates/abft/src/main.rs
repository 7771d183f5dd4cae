fn main() { std::process::exit(abft::cli::run()) }
