//! Companion gnuplot scripts for the simulation tables.

use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Bias,
    N0 { false_negatives: bool },
    Histogram,
}

pub fn script(kind: Kind, data: &Path) -> String {
    let data = data.display().to_string().replace('\'', "''");
    let head =
        format!("set datafile separator ','\nset key autotitle columnhead\nset grid\ndata = '{data}'\n");
    let body = match kind {
        Kind::Bias => "set xlabel 'bias (units of sd of control mean)'\n\
             set ylabel 'false positive rate'\n\
             set arrow from graph 0, first 0.05 to graph 1, first 0.05 nohead dt 2 lc rgb 'red'\n\
             plot data using 1:2 with linespoints title 'proposed', \\\n     \
             data using 1:3 with linespoints title 'Welch'\n"
            .to_string(),
        Kind::N0 { false_negatives } => {
            let (label, a, b) = if false_negatives {
                ("false negative rate", 4, 5)
            } else {
                ("false positive rate", 2, 3)
            };
            format!(
                "set logscale x 2\nset xlabel 'n0'\nset ylabel '{label}'\n\
                 plot data using 1:{a} with linespoints title 'proposed', \\\n     \
                 data using 1:{b} with linespoints dt 2 title 'Welch'\n"
            )
        }
        Kind::Histogram => "set xlabel 'estimated effect'\nset ylabel 'count'\n\
             set style fill transparent solid 0.4\n\
             plot data using (($1+$2)/2):3:($2-$1) with boxes title 'proposed', \\\n     \
             data using (($1+$2)/2):4:($2-$1) with boxes title 'Welch'\n"
            .to_string(),
    };
    head + &body
}
