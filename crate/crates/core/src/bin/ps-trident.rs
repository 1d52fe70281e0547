fn main() {
    std::process::exit(ps_trident::cli::dispatch(std::env::args_os()));
}
