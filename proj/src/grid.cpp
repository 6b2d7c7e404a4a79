#include "grid.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace askl {
namespace {

bool better(task_kind task, double candidate, double incumbent) {
    return task == task_kind::classification ? candidate > incumbent
                                             : candidate < incumbent;
}

// Strict preference for tie-breaking: smaller lambda1, then lambda2, then
// sigma.
bool tie_preferred(const grid_cell& candidate, const grid_cell& incumbent) {
    if (candidate.lambda1 != incumbent.lambda1)
        return candidate.lambda1 < incumbent.lambda1;
    if (candidate.lambda2 != incumbent.lambda2)
        return candidate.lambda2 < incumbent.lambda2;
    return candidate.sigma < incumbent.sigma;
}

}  // namespace

grid_result grid_search(const dataset& data, const param_grid& grid,
                        const train_config& base) {
    if (grid.lambda1_values.empty() || grid.lambda2_values.empty() ||
        grid.sigma_values.empty())
        throw argument_error("grid_search: parameter lists must be nonempty");
    for (double s : grid.sigma_values)
        if (!(s > 0)) throw argument_error("grid_search: sigma values must be positive");
    if (grid.folds < 2) throw argument_error("grid_search: need at least 2 folds");
    if (data.size() < grid.folds)
        throw argument_error("grid_search: fewer rows than folds");

    std::vector<std::vector<std::size_t>> folds =
        make_folds(data.size(), grid.folds, base.seed);

    grid_result result;
    result.best = base;
    bool have_best = false;
    grid_cell best_cell;

    for (double l1 : grid.lambda1_values) {
        for (double l2 : grid.lambda2_values) {
            for (double s : grid.sigma_values) {
                grid_cell cell;
                cell.lambda1 = l1;
                cell.lambda2 = l2;
                cell.sigma = s;

                train_config config = base;
                config.lambda1 = l1;
                config.lambda2 = l2;
                config.sigma = s;

                double total = 0.0;
                std::size_t done = 0;
                for (std::size_t f = 0; f < folds.size(); ++f) {
                    std::vector<std::size_t> train_idx;
                    for (std::size_t g = 0; g < folds.size(); ++g)
                        if (g != f)
                            train_idx.insert(train_idx.end(), folds[g].begin(),
                                             folds[g].end());
                    try {
                        standardize_result std_sets =
                            standardize(subset(data, train_idx), subset(data, folds[f]));
                        fit_result fitted = fit(std_sets.train, config);
                        total += evaluate(fitted.model, std_sets.applied).value;
                        ++done;
                    } catch (const error&) {
                        cell.failed = true;
                        break;
                    }
                }

                if (cell.failed || done == 0) {
                    cell.failed = true;
                    cell.mean_metric = std::numeric_limits<double>::quiet_NaN();
                } else {
                    cell.mean_metric = total / static_cast<double>(done);
                    bool take = !have_best ||
                                better(data.task, cell.mean_metric, best_cell.mean_metric) ||
                                (cell.mean_metric == best_cell.mean_metric &&
                                 tie_preferred(cell, best_cell));
                    if (take) {
                        have_best = true;
                        best_cell = cell;
                        result.best = config;
                    }
                }
                result.table.push_back(cell);
            }
        }
    }

    if (!have_best) throw numeric_error("grid_search: every grid cell failed");
    return result;
}

}  // namespace askl
