fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(webmaps::cli::run(&args));
}
