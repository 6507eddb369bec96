"""Catalogue of known Machin-like relations in bracket notation.

``BEST_BY_TERMS`` lists the lowest-measure unit-numerator relation known for
each term count together with its Lehmer measure to 10 decimal places.
"""

from __future__ import annotations

from .exact import Relation, parse_relation

MACHIN = "π/4 = 4[5]-1[239]"
HUTTON = "π/4 = 2[3]+1[7]"
HERMANN = "π/4 = 2[2]-1[7]"
EULER = "π/4 = 1[2]+1[3]"
GAUSS = "π/4 = 12[18]+8[57]-5[239]"
STORMER = "π/4 = 44[57]+7[239]-12[682]+24[12943]"
TAKANO = "π/4 = 12[49]+32[57]-5[239]+12[110443]"
STORMER5 = "π/4 = 88[172]+51[239]+32[682]+44[5357]+68[12943]"
CHIEN = "π/4 = 183[239]+32[1023]-68[5832]+12[110443]-12[4841182]-100[6826318]"
CHIEN_PI_122 = "π = 366[122]+128[1023]+94[5832]+48[110443]-48[4841182]-34[6826318]"
CHIEN_PI_109 = "π = 366[109]-238[1023]+94[5832]+48[110443]-48[4841182]-34[6826318]"
WETHERFIELD7 = (
    "π/4 = 83[107]+17[1710]-22[103697]-24[2513489]-44[18280007883]"
    "+12[7939642926390344818]+22[3054211727257704725384731479018]"
)
RECORD5 = "π/4 = 29[68]+42[117]-15[2675143]-5[2976163]-5[302342643]"
RECORD5_B = "π/4 = 29[68]+42[117]-15[1408818]+10[2976163]-5[302342643]"
RECORD5_C = "π/4 = 29[68]+42[117]-5[1408818]-10[2675143]-5[302342643]"
RECORD6 = (
    "π/4 = 83[107]+17[1710]-44[225443]-68[2513489]+22[42483057]"
    "+34[7939642926390344818]"
)
RECORD8 = (
    "π/4 = 83[107]+17[1799]+29[110443]+22[4841182]+17[5675477]-17[230921399215798]"
    "-17[180288246462881610746480172447]"
    "+17[68258088806587561619922885741255927889500440723402481904848]"
)
# PSLQ-found 7-term relation whose truncation after 4 terms yields RECORD8
RECORD8_PRECURSOR = (
    "π/4 = 83[107]+17[1799]+29[110443]+22[4841182]+17[5724143]+17[667557142]"
    "+17[1364321153627926317]"
)
# relations with arctan(2/a) terms
WETHERFIELD_TWO_OVER = "π/4 = 83[107]+17[1710]-22[103697]-12[2/2513489]-22[2/18280007883]"
RECORD6_TWO_OVER = "π/4 = 83[107]+17[1710]-44[225443]-34[2/2513489]+22[42483057]"

ZERO_2_3_7 = "0 = 1[2]-1[3]-1[7]"

_TABLE = [
    (2, "1.8511276523", MACHIN),
    (3, "1.7866075340", GAUSS),
    (4, "1.5860413586", STORMER),
    (5, "1.4571904502", RECORD5),
    (6, "1.3291269825", RECORD6),
    (7, "1.3408464538", WETHERFIELD7),
    (8, "1.4167155254", RECORD8),
    (9, "1.4277300989",
     "29[68]+42[117]-15[2067307]-5[104354631]-5[37754002022830328]+5[6784701313403746881217883012936028]"
     "-5[153706695994186374835327773266457656939062402170513666443115013243267]"
     "-5[232744131497684588978697366198588072121092971095376110831039663032352885258163514624748278565694466016456603534594921054494077083922083099]"
     "+5[216679322986445982382272568490612977799542467881027788691828141356248444737969338224014678003695795742715992599089842911798726698977902216611482067950856157356105538926981769052602497254285732414051485332381698050464706075217937352181455018787004171084048404595187785767858307]"),
    (10, "1.4419042849",
     "83[107]+17[1710]-22[112917]-68[2513489]+22[122261817]-22[105765955954736771]+34[7939642926390344818]"
     "+22[37315951755534592843736520276224678]"
     "-22[5183120950735156251347952259333584038201011704144309250777626572093950]"
     "-22[483565370219094780653589520268389892857600447041019458360871023697086072184994990755122112972383385497181774829503910142319319126350706751068]"),
    (11, "1.4406475833",
     "83[107]+17[1710]-44[225768]-68[2513489]+22[92866807]-22[25006102376411521]+34[7939642926390344818]"
     "+22[1456552709819752015648621402178712]"
     "-22[13519446218663109947650509037037237559876973237968142522118037123610]"
     "-22[991955953079245266974385548959755309175792978557592484113060221474505251076876235206434243729747213526161424285017818981041750239211773]"
     "+22[10134959112348344527804392569520494971086697287357393590158406211657079084503520349173141299677656646171095816120989447418951150541424947997810136848062107605261111776545978270751363275882456888729201312941418105672728754987083678664924509436369478551407903599805359788132]"),
    (12, "1.4921095533",
     "83[107]+17[1710]-88[452761]-68[2513489]-22[75757291]+22[26619138353848472]+44[46406309881072682]"
     "+34[7939642926390344818]+22[1552740245358442879545096003111139]"
     "+22[7892397331196677585383379835983113026631455870097764779488866226405]"
     "-22[65699296015786320869593856066716893749129800185319202819151454852291380141816241738912306404253371756817487701294327908830743814165355]"
     "+22[8632794993939832670748112451230064842497999893667491222538502729787729319898264659861783713136001487066117764056406191664287179911376869841893791277365861124913985478061814254780518073614587140507633566355499913511438490258926207106663273692310676785272596254378717407]"),
    (13, "1.6259278468",
     "83[107]+17[1710]-22[103615]-24[2513489]-22[64346526]+44[86718193]-22[8756857644969543]"
     "+12[7939642926390344818]-22[326062356717297569844818]+22[1867355102894027035134301488735408]"
     "+22[19826171456587659909082231353393318806646988224831087078872555617922]"
     "+22[917179840794026255056120358332428626619503750708425137609940317818147293581189653664388847143573874363412854773508297216719361688777610]"
     "+22[2523656581076866043300463048811818630190963714279867338534700369442654018006950072819452024396983318050290174370560841720378277657606609331173829131728776326166279365087406454460617465557398462538631814699502188303896290489771688980525226763109155846348268367686423158693]"),
    (14, "1.6764894343",
     "1345[1710]+166[11654]-581[48443]-708[225443]-732[2513489]+354[42483057]+1162[54252061]"
     "-83[1558810172]+83[5147177440427785908]+366[7939642926390344818]-581[79839669135881505029582]"
     "+83[222969562996807089602885876643155659684]"
     "-83[58938649855306003782663801408220460798195205953191133428534614497951030866573]"
     "+83[11810799119005632230130264080871074758919453586112153180108213002548927458013086740177685105609587262830477714762294167394949437703240807485402361548665295]"),
    (15, "1.8061930072",
     "83[239]+764[1710]-332[48443]-752[452761]-400[2513489]+664[54252061]-188[75757291]"
     "+188[26619138353848472]+376[46406309881072682]+200[7939642926390344818]-332[79839669135881505029582]"
     "+188[1552740245358442879545096003111139]"
     "+188[7892397331196677585383379835983113026631455870097764779488866226405]"
     "-188[65699296015786320869593856066716893749129800185319202819151454852291380141816241738912306404253371756817487701294327908830743814165355]"
     "+188[8632794993939832670748112451230064842497999893667491222538502729787729319898264659861783713136001487066117764056406191664287179911376869841893791277365861124913985478061814254780518073614587140507633566355499913511438490258926207106663273692310676785272596254378717407]"),
]

# (term count, lambda to 10 d.p., relation text)
BEST_BY_TERMS: list[tuple[int, str, str]] = _TABLE

# Named relations with their stated k and 4 d.p. measure where one is quoted.
NAMED: dict[str, tuple[str, str | None]] = {
    "machin": (MACHIN, "1.8511"),
    "hutton": (HUTTON, None),
    "hermann": (HERMANN, None),
    "euler": (EULER, None),
    "gauss": (GAUSS, "1.7866"),
    "stormer": (STORMER, "1.5860"),
    "takano": (TAKANO, "1.7799"),
    "stormer5": (STORMER5, "1.7320"),
    "chien": (CHIEN, "1.5124"),
    "chien_pi_122": (CHIEN_PI_122, "1.5713"),
    "chien_pi_109": (CHIEN_PI_109, "1.5828"),
    "wetherfield7": (WETHERFIELD7, "1.3408"),
    "record5": (RECORD5, "1.4572"),
    "record5_b": (RECORD5_B, "1.4642"),
    "record5_c": (RECORD5_C, "1.4654"),
    "record6": (RECORD6, "1.3291"),
    "record8": (RECORD8, "1.4167"),
    "record8_precursor": (RECORD8_PRECURSOR, "1.4643"),
    "wetherfield_two_over": (WETHERFIELD_TWO_OVER, "1.2657"),
    "record6_two_over": (RECORD6_TWO_OVER, "1.2839"),
}

# Candidate lists for prime groups used in the worked examples.
EXAMPLE_CANDIDATES: dict[tuple[int, ...], list[int]] = {
    (5,): [2, 3, 7],
    (13,): [5, 239],
    (5, 13): [2, 3, 5, 7, 8, 18, 57, 239],
    (5, 13, 61): [2, 3, 5, 7, 8, 11, 18, 57, 239, 682, 12943],
    (5, 13, 229, 457, 1201): [2, 3, 5, 7, 8, 18, 49, 57, 107, 109, 122, 239,
                              1023, 5832, 110443, 4841182, 6826318],
    (5, 13, 37, 24113, 76369): [2, 3, 5, 6, 7, 8, 18, 31, 43, 57, 68, 117, 239, 2228,
                                1408818, 2675143, 2976163, 302342643],
}

# P = {5, 113, 229, 177553} with arctan(2/x) candidates, labelled x or x/2
EXAMPLE_CANDIDATES_TWO_OVER = ["2", "3", "7", "11/2", "15", "15/2", "107", "1710", "225443",
                               "2513489/2", "42483057"]


def named(name: str) -> Relation:
    return parse_relation(NAMED[name][0])


def table_relations() -> list[Relation]:
    return [parse_relation(text) for _, _, text in BEST_BY_TERMS]
