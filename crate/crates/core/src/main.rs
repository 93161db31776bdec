use clap::Parser;

fn main() {
    let args = gradedq::cli::Args::parse();
    std::process::exit(gradedq::cli::main_with_args(args));
}
