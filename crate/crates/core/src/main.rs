fn main() {
    std::process::exit(filmgeom::cli::run(std::env::args_os()));
}
