fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(paracontact::cli::run(&args));
}
