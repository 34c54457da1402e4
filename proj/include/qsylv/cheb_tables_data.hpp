#pragma once

// Generated by tools/gen_cheb_tables. Do not edit.

#include <string_view>

namespace qsylv::detail {

inline constexpr std::string_view cf_exp_d8 = R"(# cf-exp v1 r_inf 1.1722605421581826e-08
8
3.2209452449504927 1.1936196054172865 -1.831771710441658 -9.5256081289438903
3.2209452449504927 -1.1936196054172865 -1.831771710441658 9.5256081289438903
2.2922491477094606 -3.600771496074898 2.4362407326605466 -3.7167556404583815
2.2922491477094606 3.600771496074898 2.4362407326605466 3.7167556404583815
0.2694909872462149 -6.0820325927100019 -0.63258805365597737 0.44392310265295837
0.2694909872462149 6.0820325927100019 -0.63258805365597737 -0.44392310265295837
-3.4085395015772906 -8.7730345644444316 0.02812975715819712 -0.011577384568377818
-3.4085395015772906 8.7730345644444316 0.02812975715819712 0.011577384568377818
)";

inline constexpr std::string_view cf_exp_d12 = R"(# cf-exp v1 r_inf 1.5794262599178044e-12
12
4.8274934494484869 -1.1939879904238568 -11.799379948383784 46.411635168776058
4.8274934494484869 1.1939879904238568 -11.799379948383784 -46.411635168776058
4.2061242014865394 3.5909207564085905 18.785977400491575 20.237285016046599
4.2061242014865394 -3.5909207564085905 18.785977400491575 -20.237285016046599
2.9178685418939798 6.0173459197221106 -8.238255914841254 -2.7961912205021417
2.9178685418939798 -6.0173459197221106 -8.238255914841254 2.7961912205021417
0.85170709270231726 -8.5038328190689771 1.3194115273916232 0.18352358983472419
0.85170709270231726 8.5038328190689771 1.3194115273916232 -0.18352358983472419
-2.2359682518527766 11.109296223663547 -0.068571493544943948 0.03841908323883806
-2.2359682518527766 -11.109296223663547 -0.068571493544943948 -0.03841908323883806
-6.9986879176942489 -13.995916613456787 0.00081843348584815113 0.00058135358634323325
-6.9986879176942489 13.995916613456787 0.00081843348584815113 -0.00058135358634323325
)";

inline constexpr std::string_view cf_exp_d14 = R"(# cf-exp v1 r_inf 1.8310006288935199e-14
14
5.623142760531505 -1.1940690481706853 -27.875167076986017 102.14735935849626
5.623142760531505 1.1940690481706853 -27.875167076986017 -102.14735935849626
5.0893452497373257 3.5888240341874931 46.933283221563109 45.643658634704494
5.0893452497373257 -3.5888240341874931 46.933283221563109 -45.643658634704494
3.9933699016921325 6.0048316499973078 -23.498236551713095 -5.8083604022422524
3.9933699016921325 -6.0048316499973078 -23.498236551713095 5.8083604022422524
2.2697840211370823 8.4617379834292166 4.8071130389409022 -1.3209795914904228
2.2697840211370823 -8.4617379834292166 4.8071130389409022 1.3209795914904228
-0.20875844802335899 10.991260579519219 -0.37636011651586732 0.33518352904846693
-0.20875844802335899 -10.991260579519219 -0.37636011651586732 -0.33518352904846693
-3.7032748556649899 -13.656371909965019 0.009439027699615991 0.017184795000824749
-3.7032748556649899 13.656371909965019 0.009439027699615991 -0.017184795000824749
-8.8977729553831821 16.630982686348332 -7.154290536020983e-05 0.00014361046130548506
-8.8977729553831821 -16.630982686348332 -7.154290536020983e-05 -0.00014361046130548506
)";

inline constexpr std::string_view cf_exp_d16 = R"(# cf-exp v1 r_inf 3.668940151690947e-16
16
6.416229910600352 -1.1941246108506347 -64.503950957366797 224.60665862799178
6.416229910600352 1.1941246108506347 -64.503950957366797 -224.60665862799178
5.9482055134270455 -3.5874638419164593 113.40339281022165 -101.95339863480031
5.9482055134270455 3.5874638419164593 113.40339281022165 101.95339863480031
4.9932301755673993 -5.9968917602997118 -62.521793634481924 11.191557230640203
4.9932301755673993 5.9968917602997118 -62.521793634481924 -11.191557230640203
3.5091623443778426 -8.4362109351693615 15.060524055496238 5.7515766797451091
3.5091623443778426 8.4362109351693615 15.060524055496238 -5.7515766797451091
1.4194382337188562 10.925374285879858 -1.4794100976910607 1.7687508920471056
1.4194382337188562 -10.925374285879858 -1.4794100976910607 -1.7687508920471056
-1.4138643636325605 -13.497731014464936 0.04102679400489874 0.15744429684283301
-1.4138643636325605 13.497731014464936 0.04102679400489874 -0.15744429684283301
-5.2649111239929063 16.220216619360489 0.00021153923161317225 0.0043895613960268929
-5.2649111239929063 -16.220216619360489 0.00021153923161317225 -0.0043895613960268929
-10.843873268097894 19.277427447786501 -5.0941319671755629e-07 -2.4221128066233962e-05
-10.843873268097894 -19.277427447786501 -5.0941319671755629e-07 2.4221128066233962e-05
)";

}  // namespace qsylv::detail
