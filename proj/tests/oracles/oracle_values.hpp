#pragma once

// Generated by tests/oracles/gen_oracles.py. Do not edit by hand.

#include <string>
#include <vector>

namespace oracle {

inline const std::vector<double> kChi2X = {0.5, 3.84, 10.0, 25.0, 0.0001, 80.0, 0.2, 150.0};
inline const std::vector<double> kChi2Df = {1.0, 1.0, 3.0, 5.0, 2.0, 10.0, 7.0, 4.0};
inline const std::vector<double> kChi2Sf = {0.47950012218695337, 0.05004352124870519, 0.01856613546304325, 0.0001393337911856263, 0.9999500012499791, 5.020464318829132e-13, 0.9999748437491691, 2.035764090974152e-31};
inline const std::vector<double> kNormZ = {-3.0, -1.5, 0.0, 0.3, 1.96, 4.0, 8.5};
inline const std::vector<double> kNormSf = {0.9986501019683699, 0.9331927987311419, 0.5, 0.3820885778110474, 0.024997895148220435, 3.167124183311986e-05, 9.47953482220325e-18};
inline const std::vector<double> kNormP = {1e-10, 0.001, 0.025, 0.3, 0.5, 0.975, 0.999999};
inline const std::vector<double> kNormQuantile = {-6.361340902404056, -3.090232306167813, -1.9599639845400545, -0.5244005127080409, 0.0, 1.959963984540054, 4.753424308817087};
inline const std::vector<double> kKwA = {2.9, 3.0, 2.5, 2.6, 3.2};
inline const std::vector<double> kKwB = {3.8, 2.7, 4.0, 2.4};
inline const std::vector<double> kKwC = {2.8, 3.4, 3.7, 2.2, 2.0};
inline constexpr double kKwH = 0.7714285714285722;
inline constexpr double kKwP = 0.6799647735788936;
inline const std::vector<double> kTieA = {1.0, 2.0, 2.0, 3.0, 7.0};
inline const std::vector<double> kTieB = {2.0, 3.0, 3.0, 4.0, 4.0, 5.0};
inline const std::vector<double> kTieC = {1.0, 1.0, 2.0, 6.0};
inline constexpr double kKwTieH = 2.168792359827486;
inline constexpr double kKwTieP = 0.33810587939189396;
inline constexpr double kKwSeqP = 0.02732372244729252;
inline const std::vector<double> kDunnTieBonf = {1.0, 1.0, 0.4629507771003389};
inline const std::vector<double> kDunnTieRaw = {0.34439385931906685, 0.6050286434023591, 0.15431692570011296};
inline const std::vector<double> kDunnShiftBonf = {1.0, 0.006164156928395426, 0.017459450862029564};
inline const std::vector<double> kMwA = {1.1, 3.4, 2.2, 5.9, 4.4, 7.3, 0.5};
inline const std::vector<double> kMwB = {6.1, 8.8, 9.2, 3.9, 7.7, 10.4};
inline constexpr double kMwU = 4.0;
inline constexpr double kMwP = 0.01841616057630396;
inline constexpr double kMwPNoCc = 0.015158438877439449;
inline constexpr double kMwPExact = 0.013986013986013986;
inline constexpr double kMwTieU = 9.0;
inline constexpr double kMwTieP = 0.3051980278051718;
inline constexpr double kCliffsTie = -0.4;
inline constexpr double kCliffsMw = -0.8095238095238095;
inline const std::vector<std::string> kKappaA = {"x", "x", "y", "z", "y", "x", "z", "z", "y", "x", "x", "y"};
inline const std::vector<std::string> kKappaB = {"x", "y", "y", "z", "y", "x", "x", "z", "z", "x", "y", "y"};
inline constexpr double kKappa = 0.49473684210526314;
inline const std::vector<double> kEntropyCounts = {5.0, 0.0, 3.0, 9.0, 1.0};
inline constexpr double kEntropy = 0.7217372757006031;
inline const std::vector<double> kKmT = {1.0, 2.0, 2.0, 2.0, 3.0, 4.0, 4.0, 5.0, 6.0, 6.0, 7.0, 8.0, 8.0, 9.0, 10.0, 12.0, 12.0, 15.0};
inline const std::vector<bool> kKmE = {true, true, false, true, true, false, true, true, true, true, false, true, false, false, true, true, false, false};
inline const std::vector<double> kKmTimes = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 12.0, 15.0};
inline const std::vector<double> kKmSurv = {0.9444444444444446, 0.8333333333333335, 0.7738095238095241, 0.7142857142857146, 0.6493506493506497, 0.5194805194805195, 0.5194805194805195, 0.44526901669758817, 0.44526901669758817, 0.3339517625231912, 0.2226345083487941, 0.2226345083487941};
inline constexpr double kKmMedian = 8.0;
inline const std::vector<double> kLrAT = {3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 2.0, 4.0};
inline const std::vector<double> kLrBT = {6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 5.0, 9.0};
inline const std::vector<double> kLrCT = {1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0};
inline const std::vector<bool> kLrAE = {true, true, false, true, true, false, true, true};
inline const std::vector<bool> kLrBE = {true, false, true, true, true, false, true, true, false};
inline const std::vector<bool> kLrCE = {true, true, true, true, false, true, true};
inline constexpr double kLrAbStat = 2.835653520123286;
inline constexpr double kLrAbP = 0.0921932880725514;
inline constexpr double kLr3Stat = 11.372955252082344;
inline constexpr double kLr3P = 0.00339151814978619;
inline constexpr double kLrSeparatedP = 4.2380554260794795e-10;
inline const std::vector<double> kCoxX1 = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0};
inline const std::vector<double> kCoxX2 = {-0.112, 0.11, 0.064, -1.225, 0.076, 1.359, -1.547, 0.859, 0.119, -0.641, 2.0, 0.762, -1.199, 0.075, 0.577, -0.189, 0.683, -0.067, 0.667, 1.439, -0.676, 0.203, -0.463, 0.127, -1.187, -0.579, -0.196, 0.899, 1.145, -1.324, -0.795, 0.647, -1.992, -0.463, -0.097, 1.257, 0.689, -0.327, -0.369, -0.25, 1.524, -0.428, -0.304, 0.353, -0.121, -0.197, -1.114, -0.012, -0.444, 1.166, 0.653, -0.024, 0.668, -0.34, 1.052, -0.005, 0.583, -1.291, 0.347, -1.688, -2.035, -0.304, -0.9, 0.164, 2.245, -0.832, -0.624, 0.205, 0.493, -0.176, -0.206, 0.702, 0.52, -1.034, -0.079, 0.035, -1.054, 0.26, -0.858, 0.972};
inline const std::vector<double> kCoxT = {1.0, 5.0, 7.0, 4.0, 24.0, 2.0, 2.0, 9.0, 3.0, 5.0, 17.0, 10.0, 3.0, 9.0, 33.0, 4.0, 16.0, 10.0, 10.0, 23.0, 7.0, 4.0, 6.0, 15.0, 3.0, 8.0, 2.0, 9.0, 6.0, 4.0, 3.0, 24.0, 3.0, 12.0, 9.0, 6.0, 9.0, 4.0, 4.0, 2.0, 3.0, 14.0, 4.0, 4.0, 7.0, 4.0, 7.0, 26.0, 3.0, 15.0, 2.0, 3.0, 5.0, 3.0, 1.0, 3.0, 8.0, 5.0, 7.0, 2.0, 8.0, 13.0, 10.0, 6.0, 10.0, 1.0, 1.0, 1.0, 1.0, 3.0, 1.0, 12.0, 1.0, 4.0, 3.0, 10.0, 1.0, 4.0, 11.0, 18.0};
inline const std::vector<bool> kCoxE = {true, true, true, true, true, true, true, true, true, true, false, true, true, true, false, true, true, true, false, true, true, true, true, true, true, false, true, true, true, true, true, true, true, true, true, false, true, true, true, true, true, false, true, true, true, true, true, true, true, true, true, true, true, true, true, true, false, true, true, true, false, true, false, true, false, true, true, true, true, true, true, false, true, true, true, true, true, true, true, true};
inline const std::vector<double> kCoxCoef = {0.5402876331584663, -0.39211095793659617};
inline const std::vector<double> kCoxSe = {0.2515681873656461, 0.15440842066613336};
inline const std::vector<double> kCoxP = {0.031739289999828925, 0.011103000958801726};
inline constexpr double kCoxLogLik = -242.6633562515221;
inline const std::vector<double> kPhChisq = {0.13407458864825733, 0.2469624685822672};
inline const std::vector<double> kPhP = {0.7142442176942796, 0.6192220645665734};
inline constexpr double kPhGlobal = 0.3439521350882876;
inline constexpr double kPhGlobalP = 0.8419993240390226;
inline const std::vector<double> kParT = {11.97, 20.380000000000003, 23.7, 4.38, 7.84, 69.01, 5.77, 10.59, 13.91, 16.5, 11.26, 26.41, 30.310000000000002, 8.37, 38.19, 25.2, 32.06, 28.07, 42.379999999999995, 35.97, 20.150000000000002, 20.790000000000003, 22.770000000000003, 28.35, 12.8, 14.72, 35.69, 27.16, 3.86, 19.310000000000002, 31.62, 15.02, 58.46, 19.14, 15.75, 20.48, 12.02, 20.05, 9.15, 5.18, 15.17, 16.400000000000002, 12.48, 26.75, 21.41, 20.66, 0.84, 14.549999999999999, 13.16, 5.1899999999999995, 1.91, 12.49, 21.18, 20.880000000000003, 15.51, 12.06, 10.04, 4.9799999999999995, 18.07, 22.020000000000003};
inline const std::vector<bool> kParE = {true, true, false, true, true, true, true, true, true, false, false, true, true, true, true, false, false, false, true, true, true, true, true, true, false, false, true, false, true, true, true, true, false, true, true, false, true, false, true, true, true, true, false, true, false, true, true, true, true, true, true, true, false, true, false, true, true, true, false, true};
inline constexpr double kParExpRate = 0.03705325321852609;
inline constexpr double kParExpLL = -184.70209219941674;
inline constexpr double kParWeibullShape = 1.4707419065883025;
inline constexpr double kParWeibullScale = 26.40277023874433;
inline constexpr double kParWeibullLL = -180.39464530338745;
inline constexpr double kParLogNormalMu = 2.9414096745274327;
inline constexpr double kParLogNormalSigma = 0.9351357550592683;
inline constexpr double kParLogNormalLL = -183.1253057870959;
inline constexpr double kParGammaShape = 1.8254343106743542;
inline constexpr double kParGammaRate = 0.07507271655042884;
inline constexpr double kParGammaLL = -180.40889806541443;

} // namespace oracle
