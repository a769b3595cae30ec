#include "didecomp/cds_split.hpp"

#include "didecomp/errors.hpp"

namespace didecomp {

std::pair<CdsSplitModel, CdsComponents> split_cds(const DailySeries& cds, const DailySeries& dxy,
                                                  const DailySeries& crb, const DailySeries& vix,
                                                  const DailySeries& ust10) {
    const std::vector<DailySeries> inputs = {cds.renamed("CDS"), dxy.renamed(kGlobalRegressors[0]),
                                             crb.renamed(kGlobalRegressors[1]), vix.renamed(kGlobalRegressors[2]),
                                             ust10.renamed(kGlobalRegressors[3])};
    const Frame joined = inner_join(inputs);
    if (joined.rows() <= 5) {
        throw InsufficientDataError("split_cds: joined sample has " + std::to_string(joined.rows()) +
                                    " rows, need more than 5");
    }

    const Frame design = joined.select({kGlobalRegressors[0], kGlobalRegressors[1], kGlobalRegressors[2],
                                        kGlobalRegressors[3]});
    const auto y = joined.column("CDS");

    CdsSplitModel model;
    model.fit = ols_fit(y, design, true);
    model.alpha = model.fit.coefficients[0];
    for (std::size_t j = 0; j < 4; ++j) model.gamma[j] = model.fit.coefficients[j + 1];

    CdsComponents parts{DailySeries(kCdsGlobName, joined.dates(), model.fit.fitted),
                        DailySeries(kCdsDomName, joined.dates(), model.fit.residuals)};
    return {std::move(model), std::move(parts)};
}

}  // namespace didecomp
