/*@ ghost
/@ lemma
  requires valid_str(s);
  ensures s <= strchrnul(s, c) <= s + strlen(s);
  assigns \nothing;
  allocates \nothing;
  decreases strlen(s);
  terminates \true;
@/
void strchrnul_in_range(char *s, char c)
{
    if (*s != '\0' && *s != c)
        strchrnul_in_range(s + 1, c);
}
*/

/*@ axiomatic __lf_strchrnul_in_range_HASH {
    predicate __lf_ok_strchrnul_in_range_HASH = \true;
    axiom __lf_ax_strchrnul_in_range_HASH: \forall char *s, char c; valid_str(s) ==> s <= strchrnul(s, c) <= s + strlen(s);
} */

